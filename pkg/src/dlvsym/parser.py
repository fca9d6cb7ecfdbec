"""Recursive-descent parser and canonical printer for expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' integer)?
    base   := integer | identifier | 'exp' '(' expr ')' | '(' expr ')'

Unary minus binds looser than ``^`` so ``-u^2`` reads as ``-(u^2)``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from .expr import Expr, ExprError, atom, exp

__all__ = ["ParseError", "UnknownIdentifierError", "parse", "format_expr"]


class ParseError(ExprError, ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class UnknownIdentifierError(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped, text)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("int", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, params, functions):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.params = tuple(params)
        self.functions = functions

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] == "int":
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)
        return tok

    def expr(self) -> Expr:
        value = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Expr:
        value = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, pos = self.take()
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero:
                    raise ParseError("division by zero", pos, self.text)
                value = value / rhs
        return value

    def factor(self) -> Expr:
        if self.peek() == ("op", "-", self.peek()[2]):
            self.take()
            return -self.factor()
        value = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                raise ParseError("exponent must be a non-negative integer", tok[2], self.text)
            value = value ** int(tok[1])
        return value

    def base(self) -> Expr:
        kind, value, pos = self.take()
        if kind == "int":
            return Expr.const(int(value))
        if kind == "name":
            if value == "exp":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                try:
                    return exp(arg)
                except ExprError as err:
                    raise ParseError(str(err), pos, self.text) from None
            try:
                return Expr.from_atom(atom(value, self.params, self.functions))
            except KeyError:
                raise UnknownIdentifierError(f"unknown identifier {value!r}", pos, self.text) from None
        if value == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos, self.text)


def parse(text: str, params: Iterable[str] = (),
          functions: Mapping[str, tuple[str, ...]] | None = None) -> Expr:
    """Parse ``text`` into a canonical :class:`Expr`.

    ``params`` declares extra parameter names, ``functions`` extra unknown
    functions as ``{head: argument names}``.
    """
    p = _Parser(text, params, functions)
    value = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2], text)
    return value


# printing -----------------------------------------------------------------

def _rat(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _monomial(monom, atoms) -> str:
    parts = []
    for i, e in enumerate(monom):
        if e == 1:
            parts.append(atoms[i].name)
        elif e:
            parts.append(f"{atoms[i].name}^{e}")
    return "*".join(parts)


def _poly_terms(p, atoms, scale: Fraction):
    """(sign, body) pairs in ring order, coefficients divided by ``scale``."""
    out = []
    for monom, coeff in p.terms():
        c = _rat(coeff) / scale
        mono = _monomial(monom, atoms)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        out.append((c < 0, body))
    return out


def _join(terms) -> str:
    s = ""
    for k, (neg, body) in enumerate(terms):
        if k == 0:
            s = f"-{body}" if neg else body
        else:
            s += f" - {body}" if neg else f" + {body}"
    return s


def _frac_str(f, atoms) -> tuple[str, bool]:
    """String of a field element and whether it is a single product term."""
    scale = _rat(f.denom.LC)
    num = _poly_terms(f.numer, atoms, scale)
    s_num = _join(num)
    if f.denom.is_ground:
        return s_num, len(num) == 1
    den = _poly_terms(f.denom, atoms, scale)
    s_den = _join(den)
    single_power = len(den) == 1 and "*" not in den[0][1] and not den[0][0]
    if len(num) > 1:
        s_num = f"({s_num})"
    if not single_power:
        s_den = f"({s_den})"
    return f"{s_num}/{s_den}", False


def format_expr(e: Expr) -> str:
    """Canonical text of ``e`` in the parser grammar."""
    if e.is_zero:
        return "0"
    atoms = e._atoms
    items = []
    for key, f in e._terms.items():
        body, single = _frac_str(f, atoms)
        if key is None:
            items.append(("", body))
            continue
        ex = f"exp({format_expr(key)})"
        if body == "1":
            items.append((ex, ex))
        elif body == "-1":
            items.append((ex, f"-{ex}"))
        elif single:
            items.append((ex, f"{body}*{ex}"))
        else:
            items.append((ex, f"({body})*{ex}"))
    items.sort(key=lambda kv: kv[0])
    s = ""
    for k, (_, body) in enumerate(items):
        if k == 0:
            s = body
        elif body.startswith("-"):
            s += f" - {body[1:]}" if not body.startswith("-(") else f" + {body}"
        else:
            s += f" + {body}"
    return s
