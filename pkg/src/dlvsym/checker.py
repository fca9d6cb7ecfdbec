"""Invariance criteria and determining equations."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable

from .expr import DEPENDENT, INDEPENDENT, JET_INDICES, Atom, Expr, func, jet
from .jet import VectorField, apply_prolonged, prolong2
from .model import LIE, ManifoldKind, NonConstantXi0Warning, first_type, manifold_rules, residuals, restrict

__all__ = [
    "Verdict",
    "DeterminingSystem",
    "JET_ATOMS",
    "prolonged_residuals",
    "check_invariance",
    "check_first_type",
    "unknown_field",
    "determining_equations",
    "first_type_determining_equations",
    "normalize_equation",
]

JET_ATOMS = tuple(jet(n, i) for n in DEPENDENT for i in JET_INDICES)
UNKNOWN_HEADS = ("xi0", "xi1", "eta1", "eta2", "eta3")


@dataclass
class Verdict:
    kind: ManifoldKind
    restricted_residuals: tuple[Expr, Expr, Expr]
    passed: bool
    witness: tuple[int, Expr, Expr] | None = None

    def __str__(self):
        if self.passed:
            return f"{self.kind}: pass"
        k, mono, coeff = self.witness
        return f"{self.kind}: FAIL (S{k + 1}, coefficient of {mono}: {coeff})"


def prolonged_residuals(system, q: VectorField) -> tuple[Expr, Expr, Expr]:
    """pr2(Q) applied to S_1, S_2, S_3 before any restriction."""
    p = prolong2(q)
    return tuple(apply_prolonged(p, s) for s in residuals(system))


def _witness(res: Iterable[Expr]):
    for k, r in enumerate(res):
        if r.is_zero:
            continue
        coeffs = r.collect(JET_ATOMS)
        mono = min(coeffs, key=str)
        return (k, mono, coeffs[mono])
    return None


def check_invariance(system, q: VectorField, kind: ManifoldKind = LIE,
                     prolonged: tuple[Expr, Expr, Expr] | None = None) -> Verdict:
    """Apply the second prolongation of ``q`` to the residuals and restrict
    to the manifold selected by ``kind``."""
    if prolonged is None:
        prolonged = prolonged_residuals(system, q)
    rules = manifold_rules(system, q, kind)
    restricted = tuple(restrict(r, rules) for r in prolonged)
    passed = all(r.is_zero for r in restricted)
    return Verdict(kind, restricted, passed, None if passed else _witness(restricted))


def check_first_type(system, q: VectorField, pivots: Iterable[str] = DEPENDENT,
                     prolonged=None) -> dict[str, Verdict]:
    """FirstType verdict for every pivot."""
    if prolonged is None:
        prolonged = prolonged_residuals(system, q)
    return {p: check_invariance(system, q, first_type(p), prolonged) for p in pivots}


# determining equations ------------------------------------------------------

def unknown_field() -> VectorField:
    """Operator whose coefficients are unknown functions of (t, x, u, v, w)."""
    return VectorField(*(Expr.from_atom(func(h)) for h in UNKNOWN_HEADS))


def _is_nonzero_factor(a: Atom, nonzero_heads: frozenset[str]) -> bool:
    if a.kind == "param":
        return a.name.startswith("lambda")
    return a.kind == "func" and not a.tag and a.head in nonzero_heads


def _strip(eq: Expr, nonzero_heads: frozenset[str]) -> Expr:
    """Numerator with rational content, positive powers of diffusivities
    and of nonvanishing unknowns removed; sign fixed by the leading term."""
    if eq.is_zero:
        return eq
    num = eq.numerator()
    f = num._terms[None]
    p = f.numer
    atoms = num._atoms
    monoms = p.monoms()
    common = [min(m[i] for m in monoms) for i in range(len(atoms))]
    divisor = Expr.const(1)
    for i, e in enumerate(common):
        if e and _is_nonzero_factor(atoms[i], nonzero_heads):
            divisor = divisor * Expr.from_atom(atoms[i]) ** e
    lc = p.LC
    divisor = divisor * Expr.const(lc)
    return num / divisor


def _single_unknown(eq: Expr, nonzero_heads: frozenset[str]) -> Atom | None:
    """The unknown ``A`` if ``eq`` is (nonzero factor) * A^k, else None."""
    f = eq._terms.get(None)
    if f is None or len(eq._terms) != 1 or len(f.numer) != 1:
        return None
    (monom, _), = f.numer.terms()
    found = None
    for i, e in enumerate(monom):
        if not e:
            continue
        a = eq._atoms[i]
        if _is_nonzero_factor(a, nonzero_heads):
            continue
        if a.kind != "func" or found is not None:
            return None
        found = a
    return found


def _dominated(a: Atom, zeros: set[Atom]) -> bool:
    if a in zeros:
        return True
    for z in zeros:
        if z.head == a.head and len(z.tag) < len(a.tag):
            rest = list(a.tag)
            try:
                for ch in z.tag:
                    rest.remove(ch)
            except ValueError:
                continue
            return True
    return False


def _kill(eq: Expr, zeros: set[Atom]) -> Expr:
    dead = {a: 0 for a in eq.atoms() if a.kind == "func" and _dominated(a, zeros)}
    return eq.subs(dead) if dead else eq


def _minimal(zeros: set[Atom]) -> list[Atom]:
    out = [z for z in zeros if not _dominated(z, zeros - {z})]
    return sorted(out)


def _is_linear_in_unknowns(eq: Expr) -> bool:
    unknown = [a for a in eq.atoms() if a.kind == "func"]
    return bool(unknown) and all(eq.degree(a) <= 1 for a in unknown) and all(
        eq.diff(a).atoms().isdisjoint(unknown) for a in unknown)


def normalize_equation(eq: Expr, nonzero_heads: Iterable[str] = ()) -> Expr:
    return _strip(eq, frozenset(nonzero_heads))


@dataclass
class DeterminingSystem:
    """Determining equations ``E = 0`` in normalized form.

    ``raw`` keeps the monomial coefficients as collected; ``zeros`` are the
    unknown-function derivatives shown to vanish identically.
    """

    equations: frozenset[Expr]
    raw: tuple[Expr, ...]
    zeros: tuple[Atom, ...] = ()
    nonzero_heads: frozenset[str] = field(default_factory=frozenset)

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(sorted(self.equations, key=str))

    def contains(self, eq) -> bool:
        """Membership up to a nonzero constant factor."""
        eq = Expr.coerce(eq)
        return _strip(eq, self.nonzero_heads) in self.equations

    def lines(self) -> list[str]:
        return [f"{e} = 0" for e in self]

    def satisfied_by(self, q: VectorField) -> bool:
        """Every raw equation vanishes for the concrete operator ``q``."""
        return all(_instantiate(eq, q).is_zero for eq in self.raw)


def _instantiate(eq: Expr, q: VectorField) -> Expr:
    coeffs = dict(zip(UNKNOWN_HEADS, q.coefficients()))
    binds = {}
    for a in eq.atoms():
        if a.kind == "func" and a.head in coeffs:
            value = coeffs[a.head]
            for ch in a.tag:
                value = value.diff(ch)
            binds[a] = value
    return eq.subs(binds)


_RANK_VARS = DEPENDENT + INDEPENDENT


def _rank(a: Atom):
    """Orderly ranking: derivative order, then counts in u, v, w, t, x."""
    counts = tuple(a.tag.count(v) for v in _RANK_VARS)
    head = -UNKNOWN_HEADS.index(a.head) if a.head in UNKNOWN_HEADS else 0
    return (len(a.tag), counts, head, a.name)


def _derivative_of(a: Atom, leader: Atom) -> tuple[str, ...] | None:
    """Extra differentiation letters if ``a`` is a derivative of ``leader``."""
    if a.head != leader.head or len(a.tag) < len(leader.tag):
        return None
    rest = list(a.tag)
    for ch in leader.tag:
        if ch not in rest:
            return None
        rest.remove(ch)
    return tuple(rest)


def _reduce(eq: Expr, zeros: set[Atom], pivots: dict[Atom, Expr]) -> Expr:
    """Eliminate vanishing unknowns and pivot leaders (with derivatives)."""
    for _ in range(50):
        binds = {}
        for a in eq.atoms():
            if a.kind != "func":
                continue
            if _dominated(a, zeros):
                binds[a] = Expr.const(0)
                continue
            for lead, rhs in pivots.items():
                extra = _derivative_of(a, lead)
                if extra is not None:
                    value = rhs
                    for ch in extra:
                        value = value.diff(ch)
                    binds[a] = value
                    break
        if not binds:
            return eq
        for a, value in binds.items():
            if a in eq.atoms():
                eq = eq.subs({a: value})
    raise RuntimeError("pivot reduction did not terminate")


def _unknowns(eq: Expr) -> list[Atom]:
    return [a for a in eq.atoms() if a.kind == "func"]


def _solve_leader(eq: Expr, nonzero_heads: frozenset[str]):
    """``(leader, rhs)`` if ``eq`` is linear in the unknowns with a
    nonvanishing leading coefficient, else None."""
    unknown = _unknowns(eq)
    if not unknown or not _is_linear_in_unknowns(eq):
        return None
    lead = max(unknown, key=_rank)
    coeff = eq.diff(lead)
    if not coeff.is_exp_free or not all(_is_nonzero_factor(a, nonzero_heads) for a in coeff.atoms()):
        return None
    num = coeff.numerator()._terms.get(None)
    if num is None or len(num.numer) != 1:
        return None
    rest = eq - coeff * Expr.from_atom(lead)
    return lead, -rest / coeff


def _add_pivot(eq: Expr, zeros: set[Atom], pivots: dict[Atom, Expr],
               nonzero_heads: frozenset[str]) -> bool:
    pending = [eq]
    added = False
    while pending:
        r = _reduce(pending.pop(), zeros, pivots)
        if r.is_zero:
            continue
        solved = _solve_leader(r, nonzero_heads)
        if solved is None:
            continue
        lead, rhs = solved
        for old in [k for k in pivots if _derivative_of(k, lead) is not None]:
            pending.append(Expr.from_atom(old) - pivots.pop(old))
        pivots[lead] = rhs
        for k in list(pivots):
            pivots[k] = _reduce(pivots[k], zeros, pivots)
        added = True
    return added


def _closure(raw: list[Expr], nonzero_heads: frozenset[str], rounds: int = 20):
    zeros: set[Atom] = set()
    pivots: dict[Atom, Expr] = {}
    eqs = list(raw)
    for _ in range(rounds):
        progress = False
        eqs = [e for e in (_strip(_reduce(e, zeros, pivots), nonzero_heads) for e in eqs)
               if not e.is_zero]
        for e in eqs:
            a = _single_unknown(e, nonzero_heads)
            if a is not None and not _dominated(a, zeros):
                zeros.add(a)
                progress = True
        if progress:
            continue
        for e in sorted(eqs, key=str):
            if _solve_leader(e, nonzero_heads) is not None:
                progress |= _add_pivot(e, zeros, pivots, nonzero_heads)
        if progress:
            continue
        # first-order differential consequences of the linear equations
        for e in eqs + [Expr.from_atom(k) - r for k, r in pivots.items()]:
            if not _is_linear_in_unknowns(e):
                continue
            for v in INDEPENDENT + DEPENDENT:
                d = _strip(_reduce(e.diff(v), zeros, pivots), nonzero_heads)
                if d.is_zero:
                    continue
                a = _single_unknown(d, nonzero_heads)
                if a is not None and not _dominated(a, zeros):
                    zeros.add(a)
                    progress = True
        if not progress:
            break
    # pivots may have collapsed onto vanishing unknowns
    for k in list(pivots):
        pivots[k] = _reduce(pivots[k], zeros, pivots)
    eqs = [e for e in (_strip(_reduce(e, zeros, pivots), nonzero_heads) for e in eqs)
           if not e.is_zero]
    eqs += [_strip(Expr.from_atom(k) - r, nonzero_heads) for k, r in pivots.items()]
    return eqs, zeros


def _build(system, q: VectorField, kind: ManifoldKind) -> DeterminingSystem:
    nonzero = frozenset({"xi0"}) if kind.constrained else frozenset()
    prolonged = prolonged_residuals(system, q)
    with warnings.catch_warnings():
        # xi0 is carried as a nonzero factor here
        warnings.simplefilter("ignore", NonConstantXi0Warning)
        rules = manifold_rules(system, q, kind)
    raw = []
    for r in prolonged:
        for coeff in restrict(r, rules).collect(JET_ATOMS).values():
            raw.append(coeff.numerator())
    eqs, zeros = _closure(raw, nonzero)
    minimal = _minimal(zeros)
    equations = {_strip(e, nonzero) for e in eqs}
    equations |= {Expr.from_atom(a) for a in minimal}
    equations.discard(Expr.const(0))
    return DeterminingSystem(frozenset(equations), tuple(raw), tuple(minimal), nonzero)


def determining_equations(system, q: VectorField | None = None) -> DeterminingSystem:
    """Lie determining equations for an operator with unknown coefficients."""
    return _build(system, unknown_field() if q is None else q, LIE)


def first_type_determining_equations(system, q: VectorField | None = None,
                                     pivot: str = "u") -> DeterminingSystem:
    """Determining equations on the manifold adjoining Q(pivot) = 0."""
    return _build(system, unknown_field() if q is None else q, first_type(pivot))
