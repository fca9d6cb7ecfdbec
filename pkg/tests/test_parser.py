from fractions import Fraction

import pytest

from dlvsym.expr import Expr, func, param, var
from dlvsym.parser import ParseError, UnknownIdentifierError, format_expr, parse

U, V = Expr.from_atom(var("u")), Expr.from_atom(var("v"))


@pytest.mark.parametrize("text, expected", [
    ("1 + 2*3", 7),
    ("2^3", 8),
    ("(1 + 2)*3", 9),
    ("7/2 - 1/2", 3),
    ("-2^2", -4),
    ("2**3", 8),
])
def test_precedence_on_numbers(text, expected):
    assert parse(text).as_fraction() == Fraction(expected)


def test_unary_minus_binds_looser_than_power():
    assert parse("-u^2") == -(U ** 2)
    assert parse("(-u)^2") == U ** 2


def test_implicit_identifiers():
    e = parse("lambda1*u_t - u_xx + xi0_xu")
    assert param("lambda1") in e.atoms()
    assert func("xi0", tag=("x", "u")) in e.atoms()


def test_exp_accepts_parameter_and_time_arguments():
    e = parse("exp(-a2*t)*v")
    assert e.diff("t") == parse("-a2*exp(-a2*t)*v")


def test_declared_parameters_and_functions():
    e = parse("k*g", params=["k"], functions={"g": ("x",)})
    assert e.diff("x") == parse("k*g_x", params=["k"], functions={"g": ("x",)})
    assert e.diff("t") == 0


@pytest.mark.parametrize("text, position", [
    ("u +", 3),
    ("(u + v", 6),
    ("u $ v", 2),
    ("2^u", 2),
    ("u^-1", 2),
])
def test_syntax_errors_report_position(text, position):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.position == position


def test_chained_powers_rejected():
    with pytest.raises(ParseError):
        parse("2^3^2")


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        parse("gamma*u")


def test_division_by_literal_zero():
    with pytest.raises(ParseError, match="division by zero"):
        parse("u/(1 - 1)")


def test_printing_is_deterministic_and_readable():
    e = parse("v + u^2 - 1/2*u*w")
    assert format_expr(e) == str(e) == "u^2 - 1/2*u*w + v"
    assert str(parse("u/(lambda1 - lambda2)")) == "u/(lambda1 - lambda2)"
    assert str(parse("0")) == "0"


def test_round_trip_of_rational_function_with_exponential():
    e = parse("(a1 - a2)/(lambda1 - lambda2)*u*exp(a1*t) + 3/4")
    assert parse(str(e)) == e
