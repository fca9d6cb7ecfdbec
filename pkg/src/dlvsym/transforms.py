"""Local point transformations acting on DLV systems and point operators.

A transform rewrites the old variables in terms of new ones::

    u -> c11*exp(c10*t)*u + c12*v + c13*w
    v -> c21*exp(c20*t)*v + c22*u + c23*w
    w -> c31*exp(c30*t)*w + c32*u + c33*v
    t -> c40*t + c41,   x -> c50*x + c51

so ``U = M(t) u`` with ``M`` the 3x3 mixing matrix.  Systems and operators
written in the old variables are carried to the new ones.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .expr import DEPENDENT, Expr, ExprError, exp, param, var
from .jet import VectorField
from .model import DLVSystem
from .parser import parse

__all__ = [
    "LeavesClassError",
    "NonInvertibleError",
    "LocalTransform",
    "load_transform",
    "read_transform",
]


class LeavesClassError(ExprError):
    pass


class NonInvertibleError(ExprError):
    pass


_KEYS = ("c10", "c11", "c12", "c13", "c20", "c21", "c22", "c23",
         "c30", "c31", "c32", "c33", "c40", "c41", "c50", "c51")
_DEFAULTS = {"c11": 1, "c21": 1, "c31": 1, "c40": 1, "c50": 1}
_E = Expr.coerce
_PLACEHOLDER = {n: param(f"_old_{n}") for n in ("t", "x") + DEPENDENT}


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _inv3(m):
    det = _det3(m)
    if det.is_zero:
        raise NonInvertibleError("mixing matrix is singular")
    cof = [[(m[(j + 1) % 3][(i + 1) % 3] * m[(j + 2) % 3][(i + 2) % 3]
             - m[(j + 1) % 3][(i + 2) % 3] * m[(j + 2) % 3][(i + 1) % 3]) / det
            for j in range(3)] for i in range(3)]
    return cof


def _matvec(m, v):
    return [sum((m[i][j] * v[j] for j in range(3)), Expr.const(0)) for i in range(3)]


def _matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(3)), Expr.const(0)) for j in range(3)]
            for i in range(3)]


@dataclass(frozen=True)
class LocalTransform:
    """Coefficients ``c_ij`` of the transformation family; see module doc."""

    c: tuple[tuple[str, Expr], ...]

    @classmethod
    def make(cls, **coeffs) -> "LocalTransform":
        unknown = set(coeffs) - set(_KEYS)
        if unknown:
            raise ExprError("unknown transform coefficients: " + ", ".join(sorted(unknown)))
        values = {k: _E(coeffs.get(k, _DEFAULTS.get(k, 0))) for k in _KEYS}
        t = cls(tuple(values.items()))
        for k in ("c11", "c21", "c31", "c40", "c50"):
            if values[k].is_zero:
                raise NonInvertibleError(f"{k} must be nonzero")
        return t

    @classmethod
    def identity(cls) -> "LocalTransform":
        return cls.make()

    @classmethod
    def scaling(cls, su=1, sv=1, sw=1) -> "LocalTransform":
        """u -> su*u, v -> sv*v, w -> sw*w."""
        return cls.make(c11=su, c21=sv, c31=sw)

    def __getitem__(self, key: str) -> Expr:
        return dict(self.c)[key]

    @property
    def has_exponentials(self) -> bool:
        return any(not self[f"c{k}0"].is_zero for k in (1, 2, 3))

    def matrix(self) -> list[list[Expr]]:
        """``M(t)`` with ``U = M(t) u`` in the new time variable."""
        t = Expr.from_atom(var("t"))
        diag = [self[f"c{k}1"] * exp(self[f"c{k}0"] * t) for k in (1, 2, 3)]
        off = {(0, 1): "c12", (0, 2): "c13", (1, 0): "c22", (1, 2): "c23",
               (2, 0): "c32", (2, 1): "c33"}
        m = [[Expr.const(0)] * 3 for _ in range(3)]
        for i in range(3):
            m[i][i] = diag[i]
        for (i, j), k in off.items():
            m[i][j] = self[k]
        return m

    def old_coordinates(self) -> dict[str, Expr]:
        """Old variables expressed in the new ones."""
        new = [Expr.from_atom(var(n)) for n in DEPENDENT]
        olds = _matvec(self.matrix(), new)
        out = {n: e for n, e in zip(DEPENDENT, olds)}
        out["t"] = self["c40"] * Expr.from_atom(var("t")) + self["c41"]
        out["x"] = self["c50"] * Expr.from_atom(var("x")) + self["c51"]
        return out

    def substitute(self, e) -> Expr:
        """Rewrite ``e`` from old to new variables (simultaneously)."""
        e = _E(e)
        if any(a.kind in ("jet", "func") for a in e.atoms()):
            raise ExprError("only point functions of (t, x, u, v, w) can be transformed")
        hold = e.subs({var(n): Expr.from_atom(p) for n, p in _PLACEHOLDER.items()})
        olds = self.old_coordinates()
        return hold.subs({p: olds[n] for n, p in _PLACEHOLDER.items()})

    # systems ----------------------------------------------------------
    def apply_to_system(self, system: DLVSystem) -> DLVSystem:
        """The system satisfied by the new variables.

        With ``U = M u``, ``lambda U_T = U_XX + C(U)`` becomes
        ``L u_t = u_xx + c50^2 M^-1 C(M u) - (c50^2/c40) M^-1 Lambda M' u``
        with ``L = (c50^2/c40) M^-1 Lambda M``; the result must again be a
        DLV system (``L`` diagonal and constant, reactions quadratic of the
        form ``u_k * (a_k + linear)``).
        """
        m = self.matrix()
        minv = _inv3(m)
        s50 = self["c50"] ** 2
        lam = [[system.lambdas[i] if i == j else Expr.const(0) for j in range(3)]
               for i in range(3)]
        big_l = _matmul(minv, _matmul(lam, m))
        big_l = [[s50 / self["c40"] * e for e in row] for row in big_l]
        for i in range(3):
            for j in range(3):
                e = big_l[i][j]
                if i != j and not e.is_zero:
                    raise LeavesClassError("transformed diffusion matrix is not diagonal")
                if i == j and (not e.is_exp_free or any(a.kind in ("indep", "dep") for a in e.atoms())):
                    raise LeavesClassError("transformed diffusivity is not constant")
        new = [Expr.from_atom(var(n)) for n in DEPENDENT]
        reactions = [self.substitute(c) for c in system.reactions]
        dm = [[e.diff("t") for e in row] for row in m]
        drift = _matvec(_matmul(minv, _matmul(lam, dm)), new)
        part = _matvec(minv, reactions)
        rows = []
        for k in range(3):
            ck = s50 * part[k] - s50 / self["c40"] * drift[k]
            rows.append(_dlv_row(ck, k))
        return DLVSystem.from_rows([big_l[k][k] for k in range(3)], rows)

    # operators --------------------------------------------------------
    def apply_to_field(self, q: VectorField) -> VectorField:
        """Push an operator in the old variables forward to the new ones."""
        minv = _inv3(self.matrix())
        xi0 = self.substitute(q.xi0) / self["c40"]
        xi1 = self.substitute(q.xi1) / self["c50"]
        eta_old = [self.substitute(e) for e in q.eta]
        new = [Expr.from_atom(var(n)) for n in DEPENDENT]
        m = self.matrix()
        # d/dt of M^-1 applied to U = M u, so  -M^-1 M' u
        dm = [[e.diff("t") for e in row] for row in m]
        drift = _matvec(minv, _matvec(dm, new))
        eta = [a - xi0 * b for a, b in zip(_matvec(minv, eta_old), drift)]
        return VectorField(xi0, xi1, *eta)

    def inverse(self) -> "LocalTransform":
        """Inverse transform; available without exponential factors."""
        if self.has_exponentials:
            raise NonInvertibleError("inverse with exponential factors leaves the family")
        minv = _inv3(self.matrix())
        c40, c50 = self["c40"], self["c50"]
        return LocalTransform.make(
            c11=minv[0][0], c12=minv[0][1], c13=minv[0][2],
            c22=minv[1][0], c21=minv[1][1], c23=minv[1][2],
            c32=minv[2][0], c33=minv[2][1], c31=minv[2][2],
            c40=1 / c40, c41=-self["c41"] / c40, c50=1 / c50, c51=-self["c51"] / c50)

    def __str__(self):
        return "; ".join(f"{k} = {v}" for k, v in self.c if v != _E(_DEFAULTS.get(k, 0)))


def _dlv_row(ck: Expr, k: int) -> tuple[Expr, Expr, Expr, Expr]:
    """(a, b, c, d) with ck = u_k*(a + b*u + c*v + d*w), else LeavesClassError."""
    if not ck.is_exp_free or ck.has(var("t"), var("x")):
        raise LeavesClassError(f"reaction {k + 1} depends explicitly on t or x: {ck}")
    uk = Expr.from_atom(var(DEPENDENT[k]))
    q = ck / uk
    if any(a.kind == "dep" for a in q.denominator().atoms()):
        raise LeavesClassError(f"reaction {k + 1} is not divisible by {DEPENDENT[k]}: {ck}")
    zero = {var(n): 0 for n in DEPENDENT}
    a = q.subs(zero)
    lin = [q.diff(n).subs(zero) for n in DEPENDENT]
    rebuilt = a + sum((c * Expr.from_atom(var(n)) for c, n in zip(lin, DEPENDENT)), Expr.const(0))
    if rebuilt != q:
        raise LeavesClassError(f"reaction {k + 1} is not of Lotka-Volterra form: {ck}")
    return (a, *lin)


_LINE = re.compile(r"^\s*(c\d\d)\s*[=:]\s*(.*?)\s*$")


def load_transform(text: str, params=()) -> LocalTransform:
    """Parse ``cij = expression`` entries; missing ones take identity values."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        for piece in line.split(";"):
            if not piece.strip():
                continue
            m = _LINE.match(piece)
            if not m or m.group(1) not in _KEYS:
                raise ExprError(f"line {lineno}: expected 'cij = expression' with cij in "
                                + ", ".join(_KEYS))
            values[m.group(1)] = parse(m.group(2), params=params)
    return LocalTransform.make(**values)


def read_transform(path: str | Path, params=()) -> LocalTransform:
    return load_transform(Path(path).read_text(), params)
