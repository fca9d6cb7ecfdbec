import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from dlvsym.expr import DEPENDENT, Expr, ExprError, jet, var
from dlvsym.jet import VectorField, apply_prolonged, prolong2, total_derivative
from dlvsym.parser import parse

from strategies import POINT, polynomials

t, x = sp.symbols("t x")
FUNCS = {n: sp.Function(n)(t, x) for n in DEPENDENT}
JETS = {"t": (t,), "x": (x,), "xx": (x, x), "xt": (x, t), "tt": (t, t)}


def _to_jet_symbols(e):
    """Replace u(t, x) and its derivatives by plain jet symbols."""
    reps = {}
    for n, f in FUNCS.items():
        for idx, wrt in JETS.items():
            reps[sp.Derivative(f, *wrt)] = sp.Symbol(f"{n}_{idx}")
    e = e.subs(reps)
    return e.subs({f: sp.Symbol(n) for n, f in FUNCS.items()})


def _characteristic_prolongation(q: VectorField, n: str, idx: str):
    """sigma = D_J(eta - xi0*u_t - xi1*u_x) + xi0*D_t u_J + xi1*D_x u_J, via sympy."""
    point = {sp.Symbol(k): f for k, f in FUNCS.items()}
    xi0, xi1, eta = (c.to_sympy().subs(point) for c in (q.xi0, q.xi1, q.eta[DEPENDENT.index(n)]))
    f = FUNCS[n]
    char = eta - xi0 * f.diff(t) - xi1 * f.diff(x)
    wrt = JETS[idx]
    uj = f.diff(*wrt)
    out = char.diff(*wrt) + xi0 * uj.diff(t) + xi1 * uj.diff(x)
    return sp.expand(_to_jet_symbols(out))


def test_total_derivative_chain_rule():
    e = parse("u^2*v + t*x")
    assert total_derivative(e, "x") == parse("2*u*v*u_x + u^2*v_x + t")
    assert total_derivative(parse("u_x"), "x") == parse("u_xx")
    assert total_derivative(parse("u_x"), "t") == parse("u_xt")
    assert total_derivative(parse("u_t"), "t") == parse("u_tt")


def test_total_derivative_refuses_third_order():
    with pytest.raises(ExprError):
        total_derivative(parse("u_xx"), "x")


def test_scaling_prolongation():
    p = prolong2(VectorField.make(eta1="u"))
    assert p.sigma_t["u"] == parse("u_t")
    assert p.sigma_xx["u"] == parse("u_xx")
    assert p.sigma_t["v"] == 0


def test_dilation_prolongation():
    p = prolong2(VectorField.make(xi0="2*t", xi1="x"))
    assert p.sigma_t["u"] == parse("-2*u_t")
    assert p.sigma_x["u"] == parse("-u_x")
    assert p.sigma_xx["u"] == parse("-2*u_xx")
    assert p.sigma_xt["u"] == parse("-3*u_xt")
    assert p.sigma_tt["u"] == parse("-4*u_tt")


def test_operator_rejects_jet_coefficients():
    with pytest.raises(ExprError):
        VectorField.make(xi0="u_t")


def test_galilei_operator_of_the_heat_equation():
    # Q = 2t d_x - x u d_u leaves u_t - u_xx invariant on its solutions
    q = VectorField.make(xi1="2*t", eta1="-x*u")
    s = apply_prolonged(prolong2(q), parse("u_t - u_xx"))
    assert s == parse("-x*(u_t - u_xx)")


@settings(max_examples=25, deadline=None)
@given(st.lists(polynomials(POINT, max_leaves=4), min_size=5, max_size=5),
       st.sampled_from(DEPENDENT), st.sampled_from(sorted(JETS)))
def test_prolongation_matches_characteristic_formula(coeffs, n, idx):
    q = VectorField(*coeffs)
    ours = prolong2(q).coefficient(n, idx).to_sympy()
    assert sp.expand(ours - _characteristic_prolongation(q, n, idx)) == 0


@settings(max_examples=25, deadline=None)
@given(st.lists(polynomials(POINT, max_leaves=4), min_size=5, max_size=5),
       st.lists(polynomials(POINT, max_leaves=4), min_size=5, max_size=5),
       st.fractions(min_value=-3, max_value=3, max_denominator=3))
def test_prolongation_is_linear(c1, c2, k):
    q1, q2 = VectorField(*c1), VectorField(*c2)
    q = q1 + q2.scale(k)
    p, p1, p2 = prolong2(q), prolong2(q1), prolong2(q2)
    for idx in JETS:
        for n in DEPENDENT:
            assert p.coefficient(n, idx) == p1.coefficient(n, idx) + k * p2.coefficient(n, idx)


def test_apply_prolonged_acts_on_point_and_jet_variables():
    q = VectorField.make(xi0=1, eta1="u")
    p = prolong2(q)
    e = Expr.from_atom(var("t")) * Expr.from_atom(jet("u", "x"))
    assert apply_prolonged(p, e) == parse("u_x + t*u_x")
