"""Reaction-diffusion systems, their residuals and manifold restrictions."""
from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .expr import DEPENDENT, Atom, Expr, ExprError, jet, param, var
from .jet import VectorField, total_derivative
from .parser import parse

__all__ = [
    "RDSystem",
    "DLVSystem",
    "ManifoldKind",
    "LIE",
    "NONCLASSICAL",
    "first_type",
    "SemiCoupledError",
    "NonConstantXi0Warning",
    "residuals",
    "invariant_surface",
    "manifold_rules",
    "restrict",
    "load_system",
    "read_system",
]


class SemiCoupledError(ExprError):
    pass


class NonConstantXi0Warning(UserWarning):
    pass


def _E(value) -> Expr:
    return Expr.coerce(value)


def _is_explicit_zero(e: Expr) -> bool:
    return e.is_zero


@dataclass(frozen=True)
class RDSystem:
    """lambda_k * u^k_t = u^k_xx + C^k(u, v, w), k = 1, 2, 3."""

    lambdas: tuple[Expr, Expr, Expr]
    reactions: tuple[Expr, Expr, Expr]

    def __post_init__(self):
        lambdas = tuple(_E(v) for v in self.lambdas)
        reactions = tuple(_E(c) for c in self.reactions)
        if len(lambdas) != 3 or len(reactions) != 3:
            raise ExprError("a three-component system needs three diffusivities and reactions")
        if any(l.is_zero for l in lambdas):
            raise ExprError("diffusivities must not vanish")
        for c in reactions:
            bad = [a.name for a in c.atoms() if a.kind in ("indep", "jet", "func")]
            if bad:
                raise ExprError("reaction terms may depend on u, v, w and parameters only; got "
                                + ", ".join(sorted(bad)))
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "reactions", reactions)

    def subs(self, bindings: Mapping) -> "RDSystem":
        return RDSystem(tuple(l.subs(bindings) for l in self.lambdas),
                        tuple(c.subs(bindings) for c in self.reactions))

    def describe(self) -> list[str]:
        out = []
        for lam, n, c in zip(self.lambdas, DEPENDENT, self.reactions):
            ls, cs = str(lam), str(c)
            lhs = f"{n}_t" if lam == 1 else (f"({ls})*{n}_t" if " " in ls else f"{ls}*{n}_t")
            if c.is_zero:
                rhs = f"{n}_xx"
            elif cs.startswith("-"):
                rhs = f"{n}_xx - {cs[1:]}"
            else:
                rhs = f"{n}_xx + {cs}"
            out.append(f"{lhs} = {rhs}")
        return out


@dataclass(frozen=True)
class DLVSystem:
    """Diffusive Lotka-Volterra system.

    ``matrix[k]`` holds the interaction row ``(b_k, c_k, d_k)`` so that
    ``C^k = u^k * (a_k + b_k*u + c_k*v + d_k*w)``.
    """

    lambdas: tuple[Expr, Expr, Expr]
    a: tuple[Expr, Expr, Expr]
    matrix: tuple[tuple[Expr, Expr, Expr], ...]

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(_E(v) for v in self.lambdas))
        object.__setattr__(self, "a", tuple(_E(v) for v in self.a))
        object.__setattr__(self, "matrix", tuple(tuple(_E(v) for v in row) for row in self.matrix))
        if len(self.matrix) != 3 or any(len(r) != 3 for r in self.matrix):
            raise ExprError("interaction matrix must be 3x3")
        if any(l.is_zero for l in self.lambdas):
            raise ExprError("diffusivities must not vanish")

    @classmethod
    def symbolic(cls, **overrides) -> "DLVSystem":
        """All coefficients as named parameters, optionally overridden."""
        def get(name):
            return _E(overrides.get(name, param(name)))
        return cls(
            tuple(get(f"lambda{k}") for k in (1, 2, 3)),
            tuple(get(f"a{k}") for k in (1, 2, 3)),
            tuple(tuple(get(f"{s}{k}") for s in "bcd") for k in (1, 2, 3)),
        )

    @classmethod
    def from_rows(cls, lambdas: Sequence, rows: Sequence[Sequence]) -> "DLVSystem":
        """Build from rows ``(a_k, b_k, c_k, d_k)``; entries may be strings."""
        rows = [[_E(v) for v in row] for row in rows]
        return cls(tuple(_E(l) for l in lambdas), tuple(r[0] for r in rows),
                   tuple(tuple(r[1:]) for r in rows))

    @property
    def reactions(self) -> tuple[Expr, Expr, Expr]:
        uvw = [Expr.from_atom(var(n)) for n in DEPENDENT]
        out = []
        for k in range(3):
            rate = self.a[k] + sum((m * q for m, q in zip(self.matrix[k], uvw)), Expr.const(0))
            out.append(uvw[k] * rate)
        return tuple(out)

    def as_rd(self) -> RDSystem:
        return RDSystem(self.lambdas, self.reactions)

    def subs(self, bindings: Mapping) -> "DLVSystem":
        return DLVSystem(tuple(l.subs(bindings) for l in self.lambdas),
                         tuple(v.subs(bindings) for v in self.a),
                         tuple(tuple(v.subs(bindings) for v in row) for row in self.matrix))

    def coefficient_map(self) -> dict[str, Expr]:
        out = {}
        for k in range(3):
            out[f"lambda{k + 1}"] = self.lambdas[k]
            out[f"a{k + 1}"] = self.a[k]
            for s, v in zip("bcd", self.matrix[k]):
                out[f"{s}{k + 1}"] = v
        return out

    def semi_coupled_rows(self) -> list[int]:
        """Equations that are explicitly autonomous (1-based)."""
        m = self.matrix
        pairs = [(m[0][1], m[0][2]), (m[1][0], m[1][2]), (m[2][0], m[2][1])]
        return [k + 1 for k, (p, q) in enumerate(pairs)
                if _is_explicit_zero(p) and _is_explicit_zero(q)]

    def check_coupled(self) -> None:
        rows = self.semi_coupled_rows()
        if rows:
            raise SemiCoupledError(f"equation(s) {rows} decouple: c1^2+d1^2, b2^2+d2^2, "
                                   "b3^2+c3^2 must all be nonzero")

    def describe(self) -> list[str]:
        return self.as_rd().describe()


@dataclass(frozen=True)
class ManifoldKind:
    """Which invariant-surface conditions are adjoined to the system."""

    name: str
    pivot: str | None = None

    def __post_init__(self):
        if self.name not in ("Lie", "FirstType", "NonClassical"):
            raise ValueError(f"unknown manifold kind {self.name!r}")
        if self.name == "FirstType" and self.pivot not in DEPENDENT:
            raise ValueError("FirstType needs a pivot among u, v, w")
        if self.name != "FirstType" and self.pivot is not None:
            raise ValueError(f"{self.name} takes no pivot")

    @property
    def constrained(self) -> tuple[str, ...]:
        if self.name == "Lie":
            return ()
        if self.name == "FirstType":
            return (self.pivot,)
        return DEPENDENT

    def __str__(self):
        return f"FirstType({self.pivot})" if self.pivot else self.name


LIE = ManifoldKind("Lie")
NONCLASSICAL = ManifoldKind("NonClassical")


def first_type(pivot: str) -> ManifoldKind:
    return ManifoldKind("FirstType", pivot)


def residuals(system) -> tuple[Expr, Expr, Expr]:
    """S_k = lambda_k * u^k_t - u^k_xx - C^k."""
    return tuple(
        lam * Expr.from_atom(jet(n, "t")) - Expr.from_atom(jet(n, "xx")) - c
        for lam, n, c in zip(system.lambdas, DEPENDENT, system.reactions)
    )


def invariant_surface(q: VectorField, name: str) -> Expr:
    """Q(u) = xi0*u_t + xi1*u_x - eta1 (and analogues)."""
    k = DEPENDENT.index(name)
    return (q.xi0 * Expr.from_atom(jet(name, "t")) + q.xi1 * Expr.from_atom(jet(name, "x"))
            - q.eta[k])


def manifold_rules(system, q: VectorField, kind: ManifoldKind) -> list[tuple[Atom, Expr]]:
    """Ordered rewrite rules restricting jet expressions to the manifold.

    Second-order mixed and time jets of the constrained variables go first
    (via D_t, D_x of their invariant-surface conditions), then the u_xx-type
    jets from the system itself, then the constrained time jets.
    """
    constrained = kind.constrained
    solved = {}
    if constrained:
        if q.xi0.is_zero:
            raise ExprError("conditional symmetry criteria need xi0 != 0")
        if not q.xi0.is_constant():
            warnings.warn(f"xi0 = {q.xi0} is not constant; restriction divides by it",
                          NonConstantXi0Warning, stacklevel=2)
        for n in constrained:
            k = DEPENDENT.index(n)
            solved[n] = (q.eta[k] - q.xi1 * Expr.from_atom(jet(n, "x"))) / q.xi0
    rules: list[tuple[Atom, Expr]] = []
    for n in constrained:
        rules.append((jet(n, "tt"), total_derivative(solved[n], "t")))
        rules.append((jet(n, "xt"), total_derivative(solved[n], "x")))
    for lam, n, c in zip(system.lambdas, DEPENDENT, system.reactions):
        rules.append((jet(n, "xx"), lam * Expr.from_atom(jet(n, "t")) - c))
    for n in constrained:
        rules.append((jet(n, "t"), solved[n]))
    return rules


def restrict(e, rules: Sequence[tuple[Atom, Expr]]) -> Expr:
    """Apply rewrite rules in order."""
    e = _E(e)
    for a, rhs in rules:
        if a in e.atoms():
            e = e.subs({a: rhs})
    return e


_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*[=:]\s*(.*?)\s*$")
_DLV_KEYS = [f"lambda{k}" for k in (1, 2, 3)] + [f"{s}{k}" for s in "abcd" for k in (1, 2, 3)]


def load_system(text: str):
    """Parse a ``key = expression`` system definition.

    Keys are ``lambda1..3`` plus either DLV coefficients ``a1..d3`` (missing
    ones stay symbolic) or general reactions ``C1..C3``.  A ``params`` line
    declares additional parameter names.
    """
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        for piece in line.split(";"):
            if not piece.strip():
                continue
            m = _LINE.match(piece)
            if not m:
                raise ExprError(f"line {lineno}: expected 'key = expression'")
            entries[m.group(1)] = m.group(2)
    extra = tuple(re.split(r"[\s,]+", entries.pop("params", "").strip())) if "params" in entries else ()
    extra = tuple(p for p in extra if p)
    unknown = set(entries) - set(_DLV_KEYS) - {"C1", "C2", "C3"}
    if unknown:
        raise ExprError("unknown system keys: " + ", ".join(sorted(unknown)))
    values = {k: parse(v, params=extra) for k, v in entries.items()}
    if any(k in values for k in ("C1", "C2", "C3")):
        if any(k in values for k in _DLV_KEYS if not k.startswith("lambda")):
            raise ExprError("give either DLV coefficients or C1..C3, not both")
        lambdas = tuple(values.get(f"lambda{k}", Expr.from_atom(param(f"lambda{k}"))) for k in (1, 2, 3))
        reactions = tuple(values.get(f"C{k}", Expr.const(0)) for k in (1, 2, 3))
        return RDSystem(lambdas, reactions)
    return DLVSystem.symbolic(**values)


def read_system(path: str | Path):
    return load_system(Path(path).read_text())
