from fractions import Fraction

import pytest

from conftest import P2
from hochlab import generators as G
from hochlab.dgla import hochschild_dgla, mc_defect
from hochlab.exactalg import HbarSeries, MultiPoly
from hochlab.hochschild import PolyDiffCochain, gerstenhaber_bracket
from hochlab.obstruction import vey_cocycle_2d
from hochlab.polyvec import PolyVector, parse_polyvector
from hochlab.starprod import (EquivalenceSeries, FormalPoisson, NotAntisymmetricError, StarProduct,
                              apply_equivalence, associativity_defect, canonical_theta, check_theta,
                              commutator_expansion, exp_equivalence, gauge_star, is_associative, jacobi_check,
                              mc_star_correspondence, moyal_weyl, star_from_json, star_from_mc, star_multiply,
                              star_to_json)

MOYAL = moyal_weyl(canonical_theta(2), 3)


def coeffs(s):
    return [str(c) for c in s]


def test_moyal_examples():
    x, y = P2("x"), P2("y")
    assert coeffs(star_multiply(MOYAL, x, y)) == ["x1*x2", "1/2", "0", "0"]
    assert coeffs(star_multiply(MOYAL, y, x)) == ["x1*x2", "-1/2", "0", "0"]
    assert coeffs(star_multiply(MOYAL, x, x)) == ["x1^2", "0", "0", "0"]
    assert coeffs(star_multiply(MOYAL, P2("x^2"), P2("y^2"))) == ["x1^2*x2^2", "2*x1*x2", "1/2", "0"]


def test_star_multiply_unit_and_commutative(rng):
    a = G.poly(rng, 2, 3)
    one = MultiPoly.constant(2, 1)
    assert coeffs(star_multiply(MOYAL, a, one)) == [str(a), "0", "0", "0"]
    b = G.poly(rng, 2, 3)
    assert star_multiply(StarProduct.commutative(2, 3), a, b)[0] == a * b
    assert all(c.is_zero() for c in list(star_multiply(StarProduct.commutative(2, 3), a, b))[1:])


def test_associativity_defect_examples():
    assert is_associative(MOYAL)
    assert is_associative(StarProduct.commutative(2, 3))
    trunc = MOYAL.truncated_to(1)
    d = associativity_defect(trunc)
    assert d[1].is_zero() and not d[2].is_zero()
    pi1 = MOYAL.Pi[1]
    assert d[2] == gerstenhaber_bracket(pi1, pi1).scale(Fraction(1, 2))


def test_mc_correspondence():
    inst = hochschild_dgla(2)
    moyal4 = moyal_weyl(canonical_theta(2), 4)
    assert all(c.is_zero() for c in mc_defect(inst, mc_star_correspondence(moyal4)))
    trunc = MOYAL.truncated_to(1)
    assert list(mc_defect(inst, mc_star_correspondence(trunc))) == list(associativity_defect(trunc))
    assert star_from_mc(mc_star_correspondence(MOYAL), 2) == MOYAL


def test_equivalences(rng):
    assert apply_equivalence(EquivalenceSeries.identity(2, 3), MOYAL) == MOYAL
    zero1 = PolyDiffCochain.zero(2, 1)
    xi1 = HbarSeries([zero1, G.cochain(rng, 2, 1, 1, 2), zero1, zero1], 3)
    xi2 = HbarSeries([zero1, zero1, G.cochain(rng, 2, 1, 1, 2), zero1], 3)
    T1, T2 = exp_equivalence(xi1, 2), exp_equivalence(xi2, 2)
    once = apply_equivalence(T2, apply_equivalence(T1, MOYAL))
    assert once == apply_equivalence(T2.compose(T1), MOYAL)
    assert is_associative(once)
    assert apply_equivalence(T1.inverse(), apply_equivalence(T1, MOYAL)) == MOYAL
    # gauge action by xi is the push-forward by exp(-xi)
    minus = HbarSeries([-c for c in xi1], 3)
    assert gauge_star(MOYAL, xi1) == apply_equivalence(exp_equivalence(minus, 2), MOYAL)


def test_commutator_expansion_examples():
    moyal4 = moyal_weyl(canonical_theta(2), 4)
    assert coeffs(commutator_expansion(moyal4, P2("x"), P2("y"))) == ["0", "1", "0", "0", "0"]
    assert coeffs(commutator_expansion(moyal4, P2("x^3"), P2("y^3"))) == ["0", "9*x1^2*x2^2", "0", "3/2", "0"]
    a = P2("x^2*y + y^3")
    assert all(c.is_zero() for c in commutator_expansion(moyal4, a, a))
    b, c = P2("x^2*y"), P2("x*y^2")
    assert commutator_expansion(moyal4, b, c)[3] == vey_cocycle_2d(b, c)


def test_jacobi_check_examples():
    def series3(pi):
        zero = PolyVector.zero(pi.dim, 2)
        return FormalPoisson(pi.dim, 2, HbarSeries([zero, pi, zero], 2))

    assert all(t.is_zero() for t in jacobi_check(series3(PolyVector.basis(2, 0, 1))))
    assert all(t.is_zero() for t in jacobi_check(series3(PolyVector(2, 2, {(0, 1): P2("x")}))))
    # z d1^d2 + x d2^d3 is Poisson (its Jacobiator vanishes on x, y, z);
    # z d1^d2 + y d2^d3 is not.
    assert all(t.is_zero() for t in jacobi_check(series3(parse_polyvector("(x3)*d1^d2 + (x1)*d2^d3", 3))))
    defect = jacobi_check(series3(parse_polyvector("(x3)*d1^d2 + (x2)*d2^d3", 3)))
    assert defect[2] == parse_polyvector("(2*x3)*d1^d2^d3", 3)


def test_theta_validation_and_json():
    with pytest.raises(NotAntisymmetricError):
        check_theta([[0, 1], [1, 0]])
    with pytest.raises(TypeError):
        check_theta([[0, 0.5], [-0.5, 0]])
    assert star_from_json(star_to_json(MOYAL)) == MOYAL


def test_moyal_random_theta_d4(rng):
    theta = G.antisymmetric_matrix(rng, 4)
    assert is_associative(moyal_weyl(theta, 2))
