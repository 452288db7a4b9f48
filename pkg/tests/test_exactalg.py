from fractions import Fraction

import pytest

from hochlab.exactalg import (DimensionError, HbarSeries, MultiPoly, OrderMismatchError, exp_minus_one_over_x,
                              format_poly, format_rational, grlex_key, monomials_of_degree, monomials_up_to,
                              parse_poly, parse_rational, poly_arith, series_arith, to_rational)

from conftest import P2


def test_poly_arith_examples():
    x, y = P2("x"), P2("y")
    assert poly_arith("mul", x + y, x - y) == P2("x^2 - y^2")
    p = P2("3*x*y + 1")
    assert poly_arith("add", p, MultiPoly.zero(2)) == p
    assert poly_arith("mul", P2("x^2*y"), P2("3*x*y^2")) == P2("3*x^3*y^3")


def test_partial_derivatives():
    assert P2("x^3*y").diff(0) == P2("3*x^2*y")
    assert P2("x^3").diff(1).is_zero()
    assert P2("x^2*y^2").diff_multi((1, 1)) == P2("4*x*y")


def test_parse_format_roundtrip():
    text = "x1^2*x2 - 3/2*x1 + 1"
    p = parse_poly(text, 2)
    assert format_poly(p) == text
    assert parse_poly(format_poly(p), 2) == p


def test_parse_rejects_bad_input():
    with pytest.raises(DimensionError):
        parse_poly("x3", 2)
    with pytest.raises(ValueError):
        parse_rational("1.5")
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(DimensionError):
        P2("x") + parse_poly("x1", 3)


def test_rationals():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"


def test_grlex_enumeration():
    monos = monomials_up_to(2, 2)
    assert monos == sorted(monos, key=grlex_key)
    assert len(monos) == 6
    assert len(monomials_of_degree(3, 2)) == 6


def test_drop_constant_and_equality():
    assert P2("x + 5").drop_constant() == P2("x")
    assert hash(P2("x*y")) == hash(P2("y*x"))


def test_series_examples():
    a = P2("x*y")
    one, zero = MultiPoly.constant(2, 1), MultiPoly.zero(2)
    s = HbarSeries([one, a, zero])
    t = HbarSeries([one, -a, zero])
    assert s * t == HbarSeries([one, zero, -(a * a)])
    c = Fraction(3)
    assert series_arith("compose_exp", HbarSeries([Fraction(0), c, Fraction(0)])).coeffs == (1, 3, Fraction(9, 2))
    assert exp_minus_one_over_x(2).coeffs == (1, Fraction(1, 2), Fraction(1, 6))


def test_series_order_mismatch():
    with pytest.raises(OrderMismatchError):
        HbarSeries([Fraction(1), Fraction(0)]) + HbarSeries([Fraction(1)])
