"""Total derivatives and second prolongation of point vector fields."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .expr import DEPENDENT, Expr, ExprError, jet, var

__all__ = [
    "JetOrderError",
    "VectorField",
    "ProlongedField",
    "total_derivative",
    "prolong2",
    "apply_prolonged",
]


class JetOrderError(ExprError):
    pass


def _E(value) -> Expr:
    return Expr.coerce(value)


def total_derivative(e, wrt: str) -> Expr:
    """D_t or D_x on the second-order jet space."""
    if wrt not in ("t", "x"):
        raise ValueError(f"total derivative is taken in t or x, not {wrt!r}")
    e = _E(e)
    result = e.diff(var(wrt))
    present = e.atoms()
    for name in DEPENDENT:
        u = var(name)
        if u in present or any(a.kind == "func" and name in a.args for a in present):
            du = e.diff(u)
            if not du.is_zero:
                result = result + Expr.from_atom(jet(name, wrt)) * du
        for index in ("t", "x", "xx", "xt", "tt"):
            a = jet(name, index)
            if a not in present:
                continue
            da = e.diff(a)
            if da.is_zero:
                continue
            if len(index) == 2:
                raise JetOrderError(f"D_{wrt} of {a.name} leaves the second-order jet space")
            result = result + Expr.from_atom(jet(name, index + wrt)) * da
    return result


@dataclass(frozen=True)
class VectorField:
    """Point operator xi0*d_t + xi1*d_x + eta1*d_u + eta2*d_v + eta3*d_w."""

    xi0: Expr
    xi1: Expr
    eta1: Expr
    eta2: Expr
    eta3: Expr

    def __post_init__(self):
        for name in ("xi0", "xi1", "eta1", "eta2", "eta3"):
            value = _E(getattr(self, name))
            object.__setattr__(self, name, value)
            if any(a.kind == "jet" for a in value.atoms()):
                raise ExprError(f"{name} of a point symmetry may not contain jet variables")

    @classmethod
    def make(cls, xi0=0, xi1=0, eta1=0, eta2=0, eta3=0) -> "VectorField":
        return cls(_E(xi0), _E(xi1), _E(eta1), _E(eta2), _E(eta3))

    @property
    def eta(self) -> tuple[Expr, Expr, Expr]:
        return (self.eta1, self.eta2, self.eta3)

    def coefficients(self) -> tuple[Expr, ...]:
        return (self.xi0, self.xi1, self.eta1, self.eta2, self.eta3)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(*(a + b for a, b in zip(self.coefficients(), other.coefficients())))

    def scale(self, c) -> "VectorField":
        c = _E(c)
        return VectorField(*(c * a for a in self.coefficients()))

    def __rmul__(self, c):
        return self.scale(c)

    def __str__(self):
        parts = []
        for coeff, d in zip(self.coefficients(), ("t", "x", "u", "v", "w")):
            if not coeff.is_zero:
                parts.append(f"({coeff})*d_{d}")
        return " + ".join(parts) or "0"


@dataclass
class ProlongedField:
    """Second prolongation; coefficients indexed by dependent variable name."""

    base: VectorField
    sigma_t: dict[str, Expr]
    sigma_x: dict[str, Expr]
    sigma_xx: dict[str, Expr]

    @cached_property
    def sigma_xt(self) -> dict[str, Expr]:
        q = self.base
        dt0, dt1 = total_derivative(q.xi0, "t"), total_derivative(q.xi1, "t")
        return {
            n: total_derivative(self.sigma_x[n], "t") - _J(n, "xt") * dt0 - _J(n, "xx") * dt1
            for n in DEPENDENT
        }

    @cached_property
    def sigma_tt(self) -> dict[str, Expr]:
        q = self.base
        dt0, dt1 = total_derivative(q.xi0, "t"), total_derivative(q.xi1, "t")
        return {
            n: total_derivative(self.sigma_t[n], "t") - _J(n, "tt") * dt0 - _J(n, "xt") * dt1
            for n in DEPENDENT
        }

    def coefficient(self, base: str, index: str) -> Expr:
        return getattr(self, f"sigma_{index}")[base]


def _J(name: str, index: str) -> Expr:
    return Expr.from_atom(jet(name, index))


def prolong2(q: VectorField) -> ProlongedField:
    dx0, dx1 = total_derivative(q.xi0, "x"), total_derivative(q.xi1, "x")
    dt0, dt1 = total_derivative(q.xi0, "t"), total_derivative(q.xi1, "t")
    st, sx, sxx = {}, {}, {}
    for n, eta in zip(DEPENDENT, q.eta):
        ut, ux = _J(n, "t"), _J(n, "x")
        sx[n] = total_derivative(eta, "x") - ut * dx0 - ux * dx1
        st[n] = total_derivative(eta, "t") - ut * dt0 - ux * dt1
        sxx[n] = total_derivative(sx[n], "x") - _J(n, "xt") * dx0 - _J(n, "xx") * dx1
    return ProlongedField(q, st, sx, sxx)


def apply_prolonged(p: ProlongedField, e) -> Expr:
    """Action of the prolonged operator on a function on the jet space."""
    e = _E(e)
    present = e.atoms()
    q = p.base
    result = Expr.const(0)
    for name, coeff in zip(("t", "x") + DEPENDENT, q.coefficients()):
        a = var(name)
        if coeff.is_zero or not (a in present or any(b.kind == "func" and name in b.args for b in present)):
            continue
        result = result + coeff * e.diff(a)
    for a in present:
        if a.kind != "jet":
            continue
        d = e.diff(a)
        if not d.is_zero:
            result = result + p.coefficient(a.head, "".join(a.tag)) * d
    return result
