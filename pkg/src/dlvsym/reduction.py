"""Reduction of the three-species competition system by a conditional symmetry.

The competition system::

    lambda_k * u^k_t = u^k_xx + u^k * (a_k - b*u - c*v - d*w)

admits the first-type operator ``d_t + kappa*u*(d_u - b/c*d_v)
+ alpha*b*u*(d_v/c - d_w/d)`` with ``kappa = (a1 - a2)/(lambda1 - lambda2)``.
Its invariant surfaces give an ansatz in three profiles ``phi_k(x)``; the
reduced ODEs have the constant solution ``phi2 = v0, phi3 = a2 - v0`` when
``a2 = a3``, which leaves a linear equation for ``phi1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping

import numpy as np
import sympy as sp

from .expr import DEPENDENT, Expr, ExprError, exp, func, jet, param, var
from .jet import VectorField
from .model import DLVSystem, invariant_surface, residuals

__all__ = [
    "DegenerateParameters",
    "NonvanishingExponentialError",
    "ExampleParams",
    "Ansatz",
    "ReducedODESystem",
    "ExactSolution",
    "competition_system",
    "competition_operator",
    "build_ansatz",
    "reduce",
    "reduce_example",
    "exact_solution_7a",
    "residual_numeric",
    "DEFAULT_PARAMS",
]


class DegenerateParameters(ExprError):
    pass


class NonvanishingExponentialError(ExprError):
    pass


_NAMES = ("lambda1", "lambda2", "lambda3", "a1", "a2", "a3", "b", "c", "d", "alpha", "v0")
PHI = tuple(func(f"phi{k}") for k in (1, 2, 3))
PHI_XX = tuple(func(f"phi{k}", tag=("x", "x")) for k in (1, 2, 3))


@dataclass(frozen=True)
class ExampleParams:
    """Parameters of the worked example; unset names stay symbolic."""

    values: tuple[tuple[str, Expr], ...]

    @classmethod
    def make(cls, mapping: Mapping[str, object] | None = None, **kw) -> "ExampleParams":
        merged = dict(mapping or {})
        merged.update(kw)
        unknown = set(merged) - set(_NAMES)
        if unknown:
            raise ExprError("unknown example parameters: " + ", ".join(sorted(unknown)))
        vals = {}
        for n in _NAMES:
            v = merged.get(n)
            if v is None:
                vals[n] = Expr.from_atom(param(n))
            elif isinstance(v, Fraction):
                vals[n] = Expr.const(v)
            else:
                vals[n] = Expr.coerce(v)
        return cls(tuple(vals.items()))

    def __getitem__(self, name: str) -> Expr:
        return dict(self.values)[name]

    def as_dict(self) -> dict[str, Expr]:
        return dict(self.values)

    @property
    def kappa(self) -> Expr:
        """Time rate (a1 - a2)/(lambda1 - lambda2)."""
        return (self["a1"] - self["a2"]) / (self["lambda1"] - self["lambda2"])

    @property
    def kappa_prime(self) -> Expr:
        """Coefficient in phi1'' + kappa' * phi1 = 0."""
        return self["lambda2"] * (self["a2"] - self["a1"]) / (self["lambda1"] - self["lambda2"])

    def restriction(self) -> Expr:
        """(lambda2 - lambda3)*a1 - (lambda1 - lambda3)*a2 + (lambda1 - lambda2)*a3."""
        l1, l2, l3 = self["lambda1"], self["lambda2"], self["lambda3"]
        return (l2 - l3) * self["a1"] - (l1 - l3) * self["a2"] + (l1 - l2) * self["a3"]

    def with_restriction(self) -> "ExampleParams":
        """a3 solved from the restriction when it is still free."""
        a3 = self["a3"]
        if a3 != Expr.from_atom(param("a3")):
            return self
        l1, l2, l3 = self["lambda1"], self["lambda2"], self["lambda3"]
        solved = ((l1 - l3) * self["a2"] - (l2 - l3) * self["a1"]) / (l1 - l2)
        return ExampleParams(tuple((n, solved if n == "a3" else v) for n, v in self.values))

    def check_generic(self) -> None:
        if (self["a1"] - self["a2"]).is_zero:
            raise DegenerateParameters("the ansatz needs a_1 \\neq a_2")
        if (self["lambda1"] - self["lambda2"]).is_zero:
            raise DegenerateParameters("the ansatz needs lambda_1 \\neq lambda_2")
        for n in ("b", "c", "d"):
            if self[n].is_zero:
                raise DegenerateParameters(f"the ansatz needs {n} \\neq 0")
        for n in ("lambda1", "lambda2", "lambda3"):
            if self[n].is_zero:
                raise DegenerateParameters(f"{n} must be nonzero")


DEFAULT_PARAMS = {"lambda1": 2, "lambda2": 1, "lambda3": 1, "a1": 2, "a2": 1, "a3": 1,
                  "b": 1, "c": 1, "d": 1, "alpha": Fraction(1, 2), "v0": Fraction(1, 2)}


def competition_system(p: ExampleParams) -> DLVSystem:
    b, c, d = -p["b"], -p["c"], -p["d"]
    return DLVSystem.from_rows(
        (p["lambda1"], p["lambda2"], p["lambda3"]),
        [(p["a1"], b, c, d), (p["a2"], b, c, d), (p["a3"], b, c, d)])


def competition_operator(p: ExampleParams) -> VectorField:
    u = Expr.from_atom(var("u"))
    k, a, b, c, d = p.kappa, p["alpha"], p["b"], p["c"], p["d"]
    return VectorField(Expr.const(1), Expr.const(0), k * u,
                       -k * b / c * u + a * b / c * u, -a * b / d * u)


@dataclass(frozen=True)
class Ansatz:
    u: Expr
    v: Expr
    w: Expr
    kappa: Expr

    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.u, self.v, self.w)

    def surface_residuals(self, q: VectorField) -> tuple[Expr, Expr, Expr]:
        """Q(u), Q(v), Q(w) evaluated on the ansatz."""
        subs = self._jets()
        out = []
        for n in DEPENDENT:
            e = invariant_surface(q, n)
            out.append(e.subs(subs))
        return tuple(out)

    def _jets(self) -> dict:
        binds = {}
        for n, e in zip(DEPENDENT, self.components()):
            binds[var(n)] = e
            binds[jet(n, "t")] = e.diff("t")
            binds[jet(n, "x")] = e.diff("x")
            binds[jet(n, "xx")] = e.diff("x").diff("x")
            binds[jet(n, "xt")] = e.diff("x").diff("t")
            binds[jet(n, "tt")] = e.diff("t").diff("t")
        return binds

    def plug_into(self, system) -> tuple[Expr, Expr, Expr]:
        """Residuals S_k of ``system`` evaluated on the ansatz."""
        binds = self._jets()
        return tuple(r.subs(binds) for r in residuals(system))


def build_ansatz(p: ExampleParams) -> Ansatz:
    """Invariant-surface ansatz of the conditional operator.

    b*u = phi1*E,  c*v = phi2 + (alpha/kappa - 1)*phi1*E,
    d*w = phi3 - (alpha/kappa)*phi1*E,  E = exp(kappa*t).
    """
    p.check_generic()
    k = p.kappa
    e = exp(k * Expr.from_atom(var("t")))
    f1, f2, f3 = (Expr.from_atom(a) for a in PHI)
    r = p["alpha"] / k
    return Ansatz(f1 * e / p["b"], (f2 + (r - 1) * f1 * e) / p["c"],
                  (f3 - r * f1 * e) / p["d"], k)


@dataclass(frozen=True)
class ReducedODESystem:
    """Three ODEs ``phi_k'' = rhs_k`` stored as ``phi_k'' - rhs_k``."""

    equations: tuple[Expr, Expr, Expr]

    def as_set(self) -> frozenset[Expr]:
        return frozenset(self.equations)

    def lines(self) -> list[str]:
        return [f"{e} = 0" for e in self.equations]


def reduce(system: DLVSystem, ans: Ansatz, p: ExampleParams | None = None) -> ReducedODESystem:
    """Plug the ansatz into the system and split by exponentials.

    Every coefficient of exp(0), exp(kappa*t), exp(2*kappa*t) must vanish;
    the coefficients carrying phi_k'' are solved for it and all remaining
    ones must reduce to zero on those solutions.
    """
    if p is not None:
        q = competition_operator(p)
        if not all(r.is_zero for r in ans.surface_residuals(q)):
            raise ExprError("ansatz is not invariant under the reducing operator")
    pieces = []
    for r in ans.plug_into(system):
        for coeff in r.exp_parts().values():
            if not coeff.is_zero:
                pieces.append(coeff.numerator())
    rules: dict = {}
    for k, a in enumerate(PHI_XX):
        carriers = [e for e in pieces if e.has(a)]
        if not carriers:
            raise ExprError(f"no reduced equation for {a.name}")
        lead = min(carriers, key=lambda e: (len(e.atoms()), str(e)))
        slope = lead.diff(a)
        rules[a] = -(lead - slope * Expr.from_atom(a)) / slope
    for e in pieces:
        rest = e.subs(rules)
        if not rest.is_zero:
            raise NonvanishingExponentialError(
                f"coefficient does not vanish on the reduced system: {rest}")
    return ReducedODESystem(tuple(Expr.from_atom(a) - rules[a] for a in PHI_XX))


def reduce_example(p: ExampleParams) -> tuple[Ansatz, ReducedODESystem]:
    """Ansatz and reduced ODEs for the competition system under the
    restriction (lambda2 - lambda3)*a1 - (lambda1 - lambda3)*a2 + (lambda1 - lambda2)*a3 = 0."""
    p = p.with_restriction()
    if not p.restriction().is_zero:
        raise DegenerateParameters(
            "the reduction needs (lambda2 - lambda3)*a1 - (lambda1 - lambda3)*a2"
            " + (lambda1 - lambda2)*a3 = 0")
    ans = build_ansatz(p)
    return ans, reduce(competition_system(p), ans, p)


# exact solution ------------------------------------------------------------

@dataclass(frozen=True)
class ExactSolution:
    """(u, v, w) = A + B * phi1(x) * exp(kappa*t) componentwise.

    ``phi1`` solves phi1'' + kappa' * phi1 = 0: cos/sin for kappa' > 0,
    cosh/sinh (or exp(+-omega*x)) for kappa' < 0.
    """

    params: ExampleParams
    constants: tuple[Expr, Expr, Expr]
    amplitudes: tuple[Expr, Expr, Expr]
    kappa: Expr
    kappa_prime: Expr
    branch: str
    phi1_kind: str

    @property
    def omega(self) -> float:
        return math.sqrt(abs(float(self.kappa_prime.as_fraction())))

    def phi1_text(self) -> str:
        names = {("trigonometric", "even"): "cos", ("trigonometric", "odd"): "sin",
                 ("hyperbolic", "even"): "cosh", ("hyperbolic", "odd"): "sinh",
                 ("hyperbolic", "growing"): "exp", ("hyperbolic", "decaying"): "exp(-)"}
        name = names[(self.branch, self.phi1_kind)]
        k = abs(self.kappa_prime.as_fraction())
        arg = str(sp.sqrt(sp.Rational(k.numerator, k.denominator)) * sp.Symbol("x"))
        if name == "exp(-)":
            return f"exp(-{arg})"
        return f"{name}({arg})"

    def phi1(self, x: np.ndarray):
        """phi1 and phi1'' on an array."""
        w = self.omega
        kind = (self.branch, self.phi1_kind)
        f = {("trigonometric", "even"): np.cos(w * x), ("trigonometric", "odd"): np.sin(w * x),
             ("hyperbolic", "even"): np.cosh(w * x), ("hyperbolic", "odd"): np.sinh(w * x),
             ("hyperbolic", "growing"): np.exp(w * x),
             ("hyperbolic", "decaying"): np.exp(-w * x)}[kind]
        kp = float(self.kappa_prime.as_fraction())
        return f, -kp * f

    def expressions(self) -> tuple[Expr, Expr, Expr]:
        """Components with phi1 kept as an unknown profile of x."""
        e = exp(self.kappa * Expr.from_atom(var("t")))
        f = Expr.from_atom(PHI[0])
        return tuple(a + b * f * e for a, b in zip(self.constants, self.amplitudes))

    def symbolic_residual(self, system: DLVSystem | None = None) -> tuple[Expr, Expr, Expr]:
        """Residuals of the system on the solution, using phi1'' = -kappa'*phi1."""
        system = system or competition_system(self.params)
        ans = Ansatz(*self.expressions(), self.kappa)
        rule = {PHI_XX[0]: -self.kappa_prime * Expr.from_atom(PHI[0])}
        return tuple(r.subs(rule) for r in ans.plug_into(system))

    def to_sympy(self):
        """Closed form with phi1 written out, as sympy expressions in t, x."""
        t, x = sp.symbols("t x")
        kp = self.kappa_prime.to_sympy()
        w = sp.sqrt(abs(kp))
        phi = {("trigonometric", "even"): sp.cos(w * x), ("trigonometric", "odd"): sp.sin(w * x),
               ("hyperbolic", "even"): sp.cosh(w * x), ("hyperbolic", "odd"): sp.sinh(w * x),
               ("hyperbolic", "growing"): sp.exp(w * x),
               ("hyperbolic", "decaying"): sp.exp(-w * x)}[(self.branch, self.phi1_kind)]
        big_e = sp.exp(self.kappa.to_sympy() * t)
        return tuple(a.to_sympy() + b.to_sympy() * phi * big_e
                     for a, b in zip(self.constants, self.amplitudes))

    def perturbed(self) -> "ExactSolution":
        """Flip the sign of the alpha term in the v component only.

        Flipping alpha everywhere gives another member of the same exact
        family, so a falsifier has to break the v/w balance instead.
        """
        p = self.params
        k = self.kappa
        r = p["alpha"] / k
        amps = list(self.amplitudes)
        amps[1] = (-r - 1) / p["c"]
        return replace(self, amplitudes=tuple(amps))

    def with_alpha(self, alpha) -> "ExactSolution":
        values = dict(self.params.values)
        values["alpha"] = Expr.coerce(alpha)
        return exact_solution_7a(ExampleParams(tuple(values.items())), self.phi1_kind)


def exact_solution_7a(p: ExampleParams, phi1_kind: str = "even") -> ExactSolution:
    """Closed-form solution from phi2 = v0, phi3 = a2 - v0.

    Requires a1 != a2 = a3; the restriction then forces lambda2 = lambda3.
    The sign of kappa' must be decidable, so the rates need rational values.
    """
    p.check_generic()
    if not (p["a2"] - p["a3"]).is_zero:
        raise DegenerateParameters("the exact solution needs a_2 = a_3")
    if not p.restriction().is_zero:
        raise DegenerateParameters("the exact solution needs lambda_2 = lambda_3 "
                                   "(restriction with a_1 \\neq a_2 = a_3)")
    kp = p.kappa_prime
    if not kp.is_constant():
        raise DegenerateParameters("kappa' must be a rational number to pick the phi1 branch")
    branch = "trigonometric" if kp.as_fraction() > 0 else "hyperbolic"
    kinds = ("even", "odd") if branch == "trigonometric" else ("even", "odd", "growing", "decaying")
    if phi1_kind not in kinds:
        raise ValueError(f"phi1 kind {phi1_kind!r} not available for the {branch} branch")
    k = p.kappa
    r = p["alpha"] / k
    consts = (Expr.const(0), p["v0"] / p["c"], (p["a2"] - p["v0"]) / p["d"])
    amps = (1 / p["b"], (r - 1) / p["c"], -r / p["d"])
    return ExactSolution(p, consts, amps, k, kp, branch, phi1_kind)


def _float(e: Expr) -> float:
    return float(e.as_fraction())


def residual_numeric(system: DLVSystem, sol: ExactSolution,
                     grid: tuple[float, float, float, float, int, int] = (0, 1, 0, 1, 101, 101)
                     ) -> tuple[float, float, float]:
    """Max |lambda_k*u_t - u_xx - C^k| per equation on a tensor grid.

    ``grid`` is (t0, t1, x0, x1, nt, nx); derivatives are analytic.
    """
    t0, t1, x0, x1, nt, nx = grid
    if nt < 1 or nx < 1:
        raise ValueError("grid needs at least one point in each direction")
    t = np.linspace(t0, t1, int(nt))[:, None]
    x = np.linspace(x0, x1, int(nx))[None, :]
    kap = _float(sol.kappa)
    f, fxx = sol.phi1(x)
    big_e = np.exp(kap * t)
    comps, dts, dxxs = [], [], []
    for a, b in zip(sol.constants, sol.amplitudes):
        a, b = _float(a), _float(b)
        comps.append(a + b * f * big_e)
        dts.append(b * kap * f * big_e)
        dxxs.append(b * fxx * big_e)
    lam = [_float(l) for l in system.lambdas]
    rates = [_float(a) for a in system.a]
    mat = [[_float(m) for m in row] for row in system.matrix]
    out = []
    for k in range(3):
        rate = rates[k] + sum(mat[k][j] * comps[j] for j in range(3))
        res = lam[k] * dts[k] - dxxs[k] - comps[k] * rate
        if not np.all(np.isfinite(res)):
            raise FloatingPointError("residual overflowed on the grid")
        out.append(float(np.max(np.abs(res))))
    return tuple(out)
