import random

import pytest

from conftest import P2
from hochlab import generators as G
from hochlab.exactalg import MultiPoly
from hochlab.hochschild import PolyDiffCochain, hoch_differential
from hochlab.polyvec import (ExtForm, PolyVector, contraction_i, de_rham_d, format_graded, formality_f1,
                             formality_sign, graded_from_json, graded_to_json, hkr, lie_derivative_l,
                             parse_polyvector, schouten_bracket, wedge)

DX, DY = PolyVector.basis(2, 0), PolyVector.basis(2, 1)
DXDY = PolyVector.basis(2, 0, 1)


def fn(text):
    return PolyVector.function(P2(text))


def test_wedge_examples():
    assert wedge(DX, DY) == DXDY
    assert wedge(DY, DX) == DXDY.scale(-1)
    assert wedge(DX, DX).is_zero()
    assert wedge(fn("x"), DY) == PolyVector(2, 1, {(1,): P2("x")})


def test_schouten_examples():
    assert schouten_bracket(DX, fn("x^2")) == fn("2*x")
    assert schouten_bracket(DXDY, DXDY).is_zero()
    xb = PolyVector(2, 2, {(0, 1): P2("x")})
    assert schouten_bracket(xb, xb).is_zero()
    assert schouten_bracket(DXDY, fn("x^2*y")) == PolyVector(2, 1, {(0,): P2("x^2"), (1,): P2("-2*x*y")})


def test_three_dim_bivectors():
    # z d1^d2 + x d2^d3 is Poisson: its Jacobiator vanishes on the coordinates
    assert schouten_bracket(*[parse_polyvector("(x3)*d1^d2 + (x1)*d2^d3", 3)] * 2).is_zero()
    pi = parse_polyvector("(x3)*d1^d2 + (x2)*d2^d3", 3)
    assert schouten_bracket(pi, pi) == parse_polyvector("(2*x3)*d1^d2^d3", 3)


def test_contraction_examples():
    vol = ExtForm.basis(2, 0, 1)
    assert contraction_i(DX, vol) == ExtForm.basis(2, 1)
    # i_{a^b} = i_a o i_b, recorded in CONVENTIONS.md
    assert contraction_i(DXDY, vol) == ExtForm.function(MultiPoly.constant(2, -1))


def test_de_rham_examples():
    assert de_rham_d(ExtForm.function(P2("x^2"))) == ExtForm(2, 1, {(0,): P2("2*x")})
    assert de_rham_d(ExtForm(2, 1, {(1,): P2("x")})) == ExtForm.basis(2, 0, 1)
    assert de_rham_d(de_rham_d(ExtForm.function(P2("x*y")))).is_zero()


def test_lie_derivative_examples():
    assert lie_derivative_l(DX, ExtForm.function(P2("x^2"))) == ExtForm.function(P2("2*x"))
    assert lie_derivative_l(DX, ExtForm(2, 1, {(1,): P2("x")})) == ExtForm.basis(2, 1)
    assert lie_derivative_l(DXDY, ExtForm.zero(2, 1)).is_zero()


def test_hkr_examples():
    X, Y = (1, 0), (0, 1)
    half = PolyDiffCochain.from_words(2, [X, Y], coeff="1/2") - PolyDiffCochain.from_words(2, [Y, X], coeff="1/2")
    assert hkr(DXDY) == half
    assert hoch_differential(hkr(PolyVector(2, 2, {(0, 1): P2("x")}))).is_zero()


def test_formality_sign():
    assert [formality_sign(k) for k in range(5)] == [-1, 1, 1, -1, -1]
    assert formality_f1(fn("x")) == PolyDiffCochain.function(P2("-x"))
    assert formality_f1(DXDY) == hkr(DXDY)


def sign(n):
    return -1 if n % 2 else 1


def test_graded_jacobi_random(rng):
    for _ in range(10):
        a, b, c = (G.polyvector(rng, 3, rng.randint(0, 3), 2) for _ in range(3))
        da, db, dc = a.degree - 1, b.degree - 1, c.degree - 1
        total = (schouten_bracket(a, schouten_bracket(b, c)).scale(sign(da * dc))
                 + schouten_bracket(b, schouten_bracket(c, a)).scale(sign(db * da))
                 + schouten_bracket(c, schouten_bracket(a, b)).scale(sign(dc * db)))
        assert total.is_zero()


def test_text_and_json_roundtrip(rng):
    g = parse_polyvector("(x1^2)*d1^d2 + (-3/2*x2)*d1^d3", 3)
    assert parse_polyvector(format_graded(g), 3) == g
    assert graded_from_json(graded_to_json(g)) == g
    w = parse_polyvector("(x1)*dx2", 2, cls=ExtForm)
    assert isinstance(w, ExtForm) and graded_from_json(graded_to_json(w)) == w
    with pytest.raises(ValueError):
        parse_polyvector("(x1)*d1 + (x2)*d1^d2", 2)
