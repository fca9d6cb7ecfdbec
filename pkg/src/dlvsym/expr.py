"""Exact symbolic expressions on the second-order jet space.

An :class:`Expr` is a finite sum ``sum_k R_k * exp(E_k)`` where every ``R_k``
is a reduced fraction of multivariate polynomials with rational coefficients
and the ``E_k`` are pairwise distinct exponential-free exponents.  The
fractions are sympy sparse field elements over the atoms the expression
actually mentions, so arithmetic, cancellation and the zero test are exact.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from sympy import QQ, Integer, Symbol
from sympy import exp as sp_exp
from sympy.polys.fields import FracField

__all__ = [
    "Atom",
    "Expr",
    "ExprError",
    "DivisionByZeroError",
    "CyclicBindingError",
    "NotPolynomialError",
    "INDEPENDENT",
    "DEPENDENT",
    "JET_INDICES",
    "PARAMETERS",
    "FUNCTION_HEADS",
    "var",
    "jet",
    "param",
    "func",
    "atom",
    "const",
    "exp",
    "diff",
    "substitute",
    "collect",
    "arith",
]

INDEPENDENT = ("t", "x")
DEPENDENT = ("u", "v", "w")
JET_INDICES = ("t", "x", "xx", "xt", "tt")
POINT_ARGS = INDEPENDENT + DEPENDENT

PARAMETERS = (
    "a1", "a2", "a3", "b", "b1", "b2", "b3", "c", "c1", "c2", "c3",
    "d", "d1", "d2", "d3", "lambda1", "lambda2", "lambda3",
    "alpha", "beta", "beta1", "beta2",
    # extras used by catalog rows and the worked reduction
    "a", "alpha1", "lambda", "v0",
)

# unknown functions known to the parser, with their argument lists
FUNCTION_HEADS: dict[str, tuple[str, ...]] = {
    "xi0": POINT_ARGS,
    "xi1": POINT_ARGS,
    "eta1": POINT_ARGS,
    "eta2": POINT_ARGS,
    "eta3": POINT_ARGS,
    "h2": POINT_ARGS,
    "h3": POINT_ARGS,
    "phi1": ("x",),
    "phi2": ("x",),
    "phi3": ("x",),
}

_KIND_RANK = {"indep": 0, "dep": 1, "jet": 2, "func": 3, "param": 4}
_JET_RE = re.compile(r"^([uvw])_(t|x|xx|xt|tt)$")


class ExprError(Exception):
    pass


class DivisionByZeroError(ExprError, ZeroDivisionError):
    pass


class CyclicBindingError(ExprError):
    pass


class NotPolynomialError(ExprError):
    pass


def _natural_key(name: str):
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name))


class Atom:
    """A generator of the expression algebra.

    ``kind`` is one of ``indep``, ``dep``, ``jet``, ``param`` or ``func``.
    Jet atoms carry their base variable in ``head`` and the derivative index
    (``"x"``, ``"xt"``, ...) in ``tag``; unknown-function atoms carry the
    function name in ``head``, its arguments in ``args`` and the sorted
    derivative multi-index in ``tag``.  Atoms are identified by ``name``.
    """

    __slots__ = ("name", "kind", "head", "args", "tag", "_sort")

    def __init__(self, name: str, kind: str, head: str = "",
                 args: tuple[str, ...] = (), tag: tuple[str, ...] = ()):
        if kind not in _KIND_RANK:
            raise ValueError(f"unknown atom kind {kind!r}")
        self.name = name
        self.kind = kind
        self.head = head
        self.args = tuple(args)
        self.tag = tuple(tag)
        if kind == "indep":
            sub = (INDEPENDENT.index(name),)
        elif kind == "dep":
            sub = (DEPENDENT.index(name),)
        elif kind == "jet":
            sub = (DEPENDENT.index(head), JET_INDICES.index("".join(tag)))
        elif kind == "func":
            sub = (_natural_key(head), len(tag), tuple(args.index(a) for a in tag))
        else:
            sub = (_natural_key(name),)
        self._sort = (_KIND_RANK[kind], sub)

    def __eq__(self, other):
        return isinstance(other, Atom) and other.name == self.name

    def __hash__(self):
        return hash(self.name)

    def __lt__(self, other):
        return self._sort < other._sort

    def __repr__(self):
        return f"Atom({self.name!r}, {self.kind!r})"

    def __str__(self):
        return self.name

    @property
    def order(self) -> int:
        return len(self.tag)

    def derivative(self, wrt: str) -> "Atom":
        """Derivative-tagged atom of an unknown function."""
        if self.kind != "func" or wrt not in self.args:
            raise ExprError(f"{self.name} has no partial derivative in {wrt}")
        tag = tuple(sorted(self.tag + (wrt,), key=self.args.index))
        return func(self.head, self.args, tag)


def var(name: str) -> Atom:
    if name in INDEPENDENT:
        return Atom(name, "indep")
    if name in DEPENDENT:
        return Atom(name, "dep")
    raise ExprError(f"{name!r} is not an independent or dependent variable")


def jet(base: str, index: str) -> Atom:
    if base not in DEPENDENT:
        raise ExprError(f"no jet variables for {base!r}")
    index = "".join(sorted(index, key="xt".index))
    if index not in JET_INDICES:
        raise ExprError(f"jet index {index!r} is outside the second-order jet space")
    return Atom(f"{base}_{index}", "jet", head=base, tag=tuple(index))


def param(name: str) -> Atom:
    return Atom(name, "param")


def func(head: str, args: Iterable[str] | None = None, tag: Iterable[str] = ()) -> Atom:
    args = tuple(FUNCTION_HEADS[head] if args is None else args)
    tag = tuple(sorted(tag, key=args.index))
    name = head if not tag else f"{head}_{''.join(tag)}"
    return Atom(name, "func", head=head, args=args, tag=tag)


def atom(name: str, params: Iterable[str] = (),
         functions: Mapping[str, tuple[str, ...]] | None = None) -> Atom:
    """Resolve an identifier to an atom; raises ``KeyError`` if unknown."""
    if name in INDEPENDENT or name in DEPENDENT:
        return var(name)
    m = _JET_RE.match(name)
    if m:
        return jet(m.group(1), m.group(2))
    heads = dict(FUNCTION_HEADS)
    if functions:
        heads.update(functions)
    if name in PARAMETERS or name in tuple(params):
        return param(name)
    head, _, tag = name.partition("_")
    if head in heads:
        args = tuple(heads[head])
        if all(ch in args for ch in tag):
            return func(head, args, tuple(tag))
    raise KeyError(name)


@lru_cache(maxsize=4096)
def _field(atoms: tuple[Atom, ...]) -> FracField:
    return FracField(tuple(Symbol(a.name) for a in atoms), QQ)


def _union(a: tuple[Atom, ...], b: tuple[Atom, ...]) -> tuple[Atom, ...]:
    if a == b:
        return a
    return tuple(sorted(set(a) | set(b)))


def _convert(f, field: FracField):
    if f.field is field:
        return f
    ring = field.ring
    return field.raw_new(f.numer.set_ring(ring), f.denom.set_ring(ring))


def _to_qq(value) -> object:
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, str):
        return _to_qq(Fraction(value))
    return QQ.convert(value)


def _poly_key(p, atoms, scale):
    out = []
    for monom, coeff in p.terms():
        mono = tuple((atoms[i].name, e) for i, e in enumerate(monom) if e)
        c = Fraction(int(coeff.numerator), int(coeff.denominator)) / scale
        out.append((mono, c.numerator, c.denominator))
    out.sort()
    return tuple(out)


class Expr:
    """Immutable exact expression in canonical form.

    Equality is equality of canonical forms, so ``a == b`` decides whether
    ``a - b`` is identically zero.
    """

    __slots__ = ("_atoms", "_terms", "_key")

    def __init__(self, atoms: tuple[Atom, ...], terms: dict):
        self._atoms = atoms
        self._terms = {k: f for k, f in terms.items() if f.numer}
        self._key = None

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, value) -> "Expr":
        field = _field(())
        return cls((), {None: field(_to_qq(value))})

    @classmethod
    def from_atom(cls, a: Atom) -> "Expr":
        atoms = (a,)
        return cls(atoms, {None: _field(atoms).gens[0]})

    @classmethod
    def coerce(cls, value) -> "Expr":
        if isinstance(value, Expr):
            return value
        if isinstance(value, Atom):
            return cls.from_atom(value)
        if isinstance(value, str):
            from .parser import parse
            return parse(value)
        return cls.const(value)

    # structure --------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exp_free(self) -> bool:
        return all(k is None for k in self._terms)

    def atoms(self) -> set[Atom]:
        """Atoms that actually occur, including inside exponents."""
        used = set()
        for key, f in self._terms.items():
            for p in (f.numer, f.denom):
                for monom in p.monoms():
                    used.update(self._atoms[i] for i, e in enumerate(monom) if e)
            if key is not None:
                used |= key.atoms()
        return used

    def has(self, *atoms: Atom) -> bool:
        mine = self.atoms()
        return any(a in mine for a in atoms)

    def is_constant(self) -> bool:
        return self.is_exp_free and not self.atoms()

    def as_fraction(self) -> Fraction:
        """Rational value of a constant expression."""
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant():
            raise ExprError(f"{self} is not a rational constant")
        f = self._terms[None]
        n, d = f.numer.LC, f.denom.LC
        return Fraction(int(n.numerator), int(n.denominator)) / Fraction(
            int(d.numerator), int(d.denominator))

    def numerator(self) -> "Expr":
        """Numerator of an exponential-free expression."""
        f = self._single()
        return Expr(self._atoms, {None: f.field.raw_new(f.numer, f.field.ring.one)})

    def denominator(self) -> "Expr":
        f = self._single()
        return Expr(self._atoms, {None: f.field.raw_new(f.denom, f.field.ring.one)})

    def _single(self):
        if self.is_zero:
            return _field(self._atoms).zero
        if not self.is_exp_free:
            raise ExprError("expression contains exponential atoms")
        return self._terms[None]

    def exp_parts(self) -> dict["Expr", "Expr"]:
        """Split into ``{exponent: coefficient}`` (exponent 0 for the plain part)."""
        zero = Expr.const(0)
        return {(zero if k is None else k): Expr(self._atoms, {None: f})._prune()
                for k, f in self._terms.items()}

    def degree(self, a: Atom) -> int:
        """Degree of the numerators in ``a`` (-1 for zero)."""
        if a not in self._atoms:
            return 0 if self._terms else -1
        i = self._atoms.index(a)
        degs = [max((m[i] for m in f.numer.monoms()), default=0) for f in self._terms.values()]
        return max(degs, default=-1)

    def _prune(self) -> "Expr":
        used = set()
        for f in self._terms.values():
            for p in (f.numer, f.denom):
                for monom in p.monoms():
                    used.update(i for i, e in enumerate(monom) if e)
        if len(used) == len(self._atoms):
            return self
        atoms = tuple(a for i, a in enumerate(self._atoms) if i in used)
        field = _field(atoms)
        return Expr(atoms, {k: _convert(f, field) for k, f in self._terms.items()})

    # canonical key ----------------------------------------------------
    def _canonical(self):
        if self._key is None:
            items = []
            for k, f in self._terms.items():
                lc = f.denom.LC
                scale = Fraction(int(lc.numerator), int(lc.denominator))
                items.append((
                    () if k is None else k._canonical(),
                    _poly_key(f.numer, self._atoms, scale),
                    _poly_key(f.denom, self._atoms, scale),
                ))
            items.sort()
            self._key = tuple(items)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction, Atom)):
                other = Expr.coerce(other)
            else:
                return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self):
        return hash(self._canonical())

    # arithmetic -------------------------------------------------------
    def _unified(self, other: "Expr"):
        atoms = _union(self._atoms, other._atoms)
        field = _field(atoms)
        a = {k: _convert(f, field) for k, f in self._terms.items()}
        b = {k: _convert(f, field) for k, f in other._terms.items()}
        return atoms, field, a, b

    def __add__(self, other):
        other = Expr.coerce(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        atoms, _, a, b = self._unified(other)
        for k, f in b.items():
            a[k] = a[k] + f if k in a else f
        return Expr(atoms, a)

    __radd__ = __add__

    def __neg__(self):
        return Expr(self._atoms, {k: -f for k, f in self._terms.items()})

    def __sub__(self, other):
        return self + (-Expr.coerce(other))

    def __rsub__(self, other):
        return Expr.coerce(other) + (-self)

    def __mul__(self, other):
        other = Expr.coerce(other)
        if self.is_zero or other.is_zero:
            return Expr.const(0)
        atoms, _, a, b = self._unified(other)
        out: dict = {}
        for ka, fa in a.items():
            for kb, fb in b.items():
                k = _add_exponents(ka, kb)
                prod = fa * fb
                out[k] = out[k] + prod if k in out else prod
        return Expr(atoms, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Expr.coerce(other)
        if other.is_zero:
            raise DivisionByZeroError(f"division by zero expression ({self}) / 0")
        if len(other._terms) > 1:
            raise ExprError("cannot divide by a sum of distinct exponentials")
        (kb, fb), = other._terms.items()
        inv = Expr(other._atoms, {None if kb is None else _neg_key(kb): 1 / fb})
        return self * inv

    def __rtruediv__(self, other):
        return Expr.coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ExprError("only integer powers are supported")
        if n < 0:
            return Expr.const(1) / (self ** (-n))
        result = Expr.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # calculus ---------------------------------------------------------
    def diff(self, a: Atom | str) -> "Expr":
        """Partial derivative; unknown functions pick up derivative tags."""
        if isinstance(a, str):
            a = atom(a)
        result = Expr.const(0)
        field = _field(self._atoms)
        for key, f in self._terms.items():
            for i, g in enumerate(self._atoms):
                if g == a:
                    dg = None
                elif g.kind == "func" and a.kind in ("indep", "dep") and a.name in g.args:
                    dg = Expr.from_atom(g.derivative(a.name))
                else:
                    continue
                df = _fdiff(f, field.gens[i])
                if not df.numer:
                    continue
                piece = Expr(self._atoms, {key: df})
                result = result + (piece if dg is None else piece * dg)
            if key is not None:
                dk = key.diff(a)
                if not dk.is_zero:
                    result = result + Expr(self._atoms, {key: f}) * dk
        return result._prune()

    def subs(self, bindings: Mapping) -> "Expr":
        """Simultaneous substitution of atoms by expressions."""
        binds = {}
        for k, v in bindings.items():
            k = atom(k) if isinstance(k, str) else k
            binds[k] = Expr.coerce(v)
        if not binds:
            return self
        bound = set(binds)
        for v in binds.values():
            hit = bound & v.atoms()
            if hit:
                raise CyclicBindingError(
                    "binding values mention bound atoms: " + ", ".join(sorted(a.name for a in hit)))
        idx = [i for i, a in enumerate(self._atoms) if a in bound]
        keys_hit = any(k is not None and k.has(*bound) for k in self._terms)
        if not idx and not keys_hit:
            return self
        reps = [binds[self._atoms[i]] for i in idx]
        result = Expr.const(0)
        for key, f in self._terms.items():
            num = _eval_poly(f.numer, self._atoms, idx, reps)
            den = _eval_poly(f.denom, self._atoms, idx, reps)
            if den.is_zero:
                raise DivisionByZeroError("substitution makes a denominator vanish")
            term = num / den
            if key is not None:
                term = term * exp(key.subs(binds))
            result = result + term
        return result._prune()

    def collect(self, split_atoms: Iterable[Atom]) -> dict["Expr", "Expr"]:
        """Coefficients of the monomials in ``split_atoms``.

        Returns ``{monomial: coefficient}`` with zero coefficients omitted.
        """
        split = set(atom(a) if isinstance(a, str) else a for a in split_atoms)
        idx = [i for i, a in enumerate(self._atoms) if a in split]
        for k in self._terms:
            if k is not None and k.has(*split):
                raise NotPolynomialError("split atom occurs inside an exponent")
        out: dict[Expr, Expr] = {}
        for key, f in self._terms.items():
            if any(m[i] for m in f.denom.monoms() for i in idx):
                raise NotPolynomialError(f"{self} has a split atom in a denominator")
            groups: dict[tuple, dict] = {}
            for monom, coeff in f.numer.terms():
                sel = tuple(monom[i] for i in idx)
                rest = list(monom)
                for i in idx:
                    rest[i] = 0
                groups.setdefault(sel, {})[tuple(rest)] = coeff
            ring = f.field.ring
            for sel, terms in groups.items():
                coef = Expr(self._atoms, {key: f.field.new(ring.from_dict(terms), f.denom)})._prune()
                mono = Expr.const(1)
                for i, e in zip(idx, sel):
                    if e:
                        mono = mono * Expr.from_atom(self._atoms[i]) ** e
                out[mono] = out[mono] + coef if mono in out else coef
        return {m: c for m, c in out.items() if not c.is_zero}

    # conversion -------------------------------------------------------
    def to_sympy(self):
        """Equivalent sympy expression (for numerics and display)."""
        total = Integer(0)
        for key, f in self._terms.items():
            term = f.as_expr()
            if key is not None:
                term = term * sp_exp(key.to_sympy())
            total = total + term
        return total

    def __str__(self):
        from .parser import format_expr
        return format_expr(self)

    def __repr__(self):
        return f"Expr({str(self)!r})"


def _fdiff(f, gen):
    x = gen.to_poly()
    if f.denom.is_ground:
        return f.field.raw_new(f.numer.diff(x), f.denom)
    return f.diff(gen)


def _add_exponents(ka, kb):
    if ka is None:
        return kb
    if kb is None:
        return ka
    s = ka + kb
    return None if s.is_zero else s


def _neg_key(k):
    return -k


def _eval_poly(p, atoms, idx, reps) -> Expr:
    """Evaluate polynomial ``p`` with the generators at ``idx`` replaced."""
    groups: dict[tuple, dict] = {}
    for monom, coeff in p.terms():
        sel = tuple(monom[i] for i in idx)
        rest = list(monom)
        for i in idx:
            rest[i] = 0
        groups.setdefault(sel, {})[tuple(rest)] = coeff
    ring = p.ring
    field = _field(atoms)
    powers: dict[tuple[int, int], Expr] = {}

    def power(j, e):
        if (j, e) not in powers:
            powers[(j, e)] = reps[j] ** e
        return powers[(j, e)]

    total = Expr.const(0)
    for sel, terms in groups.items():
        piece = Expr(atoms, {None: field.raw_new(ring.from_dict(terms), ring.one)})
        for j, e in enumerate(sel):
            if e:
                piece = piece * power(j, e)
        total = total + piece
    return total


def const(value) -> Expr:
    return Expr.const(value)


def exp(arg) -> Expr:
    """The exponential atom ``exp(arg)``; ``arg`` must be exponential-free
    and free of dependent and jet variables."""
    arg = Expr.coerce(arg)
    if not arg.is_exp_free:
        raise ExprError("nested exponentials are not supported")
    bad = [a.name for a in arg.atoms() if a.kind in ("dep", "jet", "func")]
    if bad:
        raise ExprError("exponent may not depend on " + ", ".join(sorted(bad)))
    if arg.is_zero:
        return Expr.const(1)
    arg = arg._prune()
    return Expr((), {arg: _field(()).one})


def diff(e: Expr, a: Atom | str) -> Expr:
    return Expr.coerce(e).diff(a)


def substitute(e: Expr, bindings: Mapping) -> Expr:
    return Expr.coerce(e).subs(bindings)


def collect(e: Expr, split_atoms: Iterable[Atom]) -> dict[Expr, Expr]:
    return Expr.coerce(e).collect(split_atoms)


def arith(op: str, lhs, rhs) -> Expr:
    """Binary arithmetic by operator symbol; ``^`` takes an integer rhs."""
    lhs = Expr.coerce(lhs)
    if op == "^":
        n = rhs if isinstance(rhs, int) else int(Expr.coerce(rhs).as_fraction())
        return lhs ** n
    rhs = Expr.coerce(rhs)
    ops = {"+": Expr.__add__, "-": Expr.__sub__, "*": Expr.__mul__, "/": Expr.__truediv__}
    try:
        return ops[op](lhs, rhs)
    except KeyError:
        raise ExprError(f"unknown operator {op!r}") from None
