from fractions import Fraction

import pytest

from conftest import P2
from hochlab import generators as G
from hochlab.dgla import (CeWord, GaugeElement, GradingError, McElement, NotMaurerCartanError, WordTooLongError, bch,
                          ce_coderivation, ce_expand, ce_square, gauge_action, hochschild_dgla, is_maurer_cartan,
                          jacobi_defect, mc_defect, polyvector_gla, series_bracket, series_differential,
                          twist_differential)
from hochlab.exactalg import HbarSeries
from hochlab.hochschild import PolyDiffCochain, gerstenhaber_bracket
from hochlab.polyvec import PolyVector, parse_polyvector, schouten_bracket
from hochlab.starprod import canonical_theta, moyal_weyl

HOCH = hochschild_dgla(2)
X, Y = (1, 0), (0, 1)


def zero2(order):
    return [PolyDiffCochain.zero(2, 2)] * (order + 1)


def series(coeffs):
    return HbarSeries(coeffs, len(coeffs) - 1)


def is_zero_series(s):
    return all(c.is_zero() for c in s)


def test_mc_defect_examples():
    assert is_zero_series(mc_defect(HOCH, series(zero2(2))))
    assert is_zero_series(mc_defect(HOCH, moyal_weyl(canonical_theta(2), 4).Pi))
    p1 = PolyDiffCochain.from_words(2, [X, Y])
    d = mc_defect(HOCH, series([PolyDiffCochain.zero(2, 2), p1, PolyDiffCochain.zero(2, 2)]))
    assert d[1].is_zero()
    assert not d[2].is_zero()
    assert d[2] == gerstenhaber_bracket(p1, p1).scale(Fraction(1, 2))


def test_mc_element_grading():
    with pytest.raises(GradingError):
        McElement(HOCH, series([PolyDiffCochain.zero(2, 1), PolyDiffCochain.from_words(2, [X])]))
    with pytest.raises(GradingError):
        McElement(HOCH, series([PolyDiffCochain.mu(2), PolyDiffCochain.zero(2, 2)]))
    GaugeElement(HOCH, series([PolyDiffCochain.zero(2, 1), PolyDiffCochain.from_words(2, [X])]))


def test_twist_examples(rng):
    pv = polyvector_gla(2)
    pi = PolyVector(2, 2, {(0, 1): P2("x")})
    tw = twist_differential(pv, pi)
    for _ in range(5):
        g = G.polyvector(rng, 2, rng.randint(0, 2))
        assert tw.differential(g) == schouten_bracket(pi, g)  # Lichnerowicz differential
        assert tw.differential(tw.differential(g)).is_zero()
    assert twist_differential(pv, PolyVector.zero(2, 2)).differential(pi).is_zero()
    with pytest.raises(NotMaurerCartanError):
        twist_differential(polyvector_gla(3), parse_polyvector("(x3)*d1^d2 + (x2)*d2^d3", 3))


def test_gauge_examples(rng):
    zero1 = PolyDiffCochain.zero(2, 1)
    alpha = moyal_weyl(canonical_theta(2), 2).Pi
    xi0 = series([zero1] * 3)
    assert gauge_action(HOCH, xi0, alpha) == alpha
    xi = series([zero1, G.cochain(rng, 2, 1, 2, 2), G.cochain(rng, 2, 1, 2, 2)])
    dxi = series_differential(HOCH, xi)
    expected = dxi + series_bracket(HOCH, dxi, xi).scale(Fraction(1, 2))
    assert gauge_action(HOCH, xi, series(zero2(2))) == expected
    assert is_zero_series(mc_defect(HOCH, gauge_action(HOCH, xi, alpha)))


def test_bch_composition(rng):
    zero1 = PolyDiffCochain.zero(2, 1)
    alpha = moyal_weyl(canonical_theta(2), 3).Pi
    xi = series([zero1, G.cochain(rng, 2, 1, 1, 2), zero1, zero1])
    eta = series([zero1, zero1, G.cochain(rng, 2, 1, 1, 2), zero1])
    two_steps = gauge_action(HOCH, eta, gauge_action(HOCH, xi, alpha))
    assert two_steps == gauge_action(HOCH, bch(HOCH, xi, eta), alpha)


def test_ce_closed_pair():
    pv = polyvector_gla(2)
    v1 = PolyVector(2, 1, {(0,): P2("x*y")})
    v2 = PolyVector(2, 2, {(0, 1): P2("y^2")})
    q = ce_coderivation(pv, CeWord((v1, v2)))
    sign = -1 if (pv.lie_degree(v1) + 1) % 2 else 1
    assert q == ce_expand(pv, CeWord((schouten_bracket(v1, v2),))).scale(sign)


def test_ce_square_zero(rng):
    for inst, make in ((polyvector_gla(2), lambda: G.polyvector(rng, 2, rng.randint(1, 2), 1)),
                       (HOCH, lambda: G.cochain(rng, 2, rng.randint(0, 2), 1, 1, n_terms=1))):
        w = CeWord(tuple(make() for _ in range(2)))
        assert ce_square(inst, w).is_zero()
    with pytest.raises(WordTooLongError):
        ce_coderivation(polyvector_gla(2), CeWord((PolyVector.basis(2, 0), PolyVector.basis(2, 1), PolyVector.function(P2("x")))), max_length=2)


def test_jacobi_generic(rng):
    for _ in range(5):
        a, b, c = (G.cochain(rng, 2, rng.randint(0, 2), 1, 2, n_terms=2) for _ in range(3))
        assert jacobi_defect(HOCH, a, b, c).is_zero()
