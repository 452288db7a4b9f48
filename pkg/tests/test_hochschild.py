import random
from fractions import Fraction

import pytest

from conftest import P2
from hochlab import generators as G
from hochlab.exactalg import MultiPoly
from hochlab.hochschild import (Bounds, CyclicChain, HochChain, NotACocycleError, PolyDiffCochain, chain_boundary,
                                chain_from_json, chain_to_json, coboundary_solve, cochain_apply, cochain_from_json,
                                cochain_to_json, connes_B, contraction_I, cup, cyclic_differential,
                                gerstenhaber_bracket, hoch_differential, lie_derivative_L, mu_bracket_sign,
                                verify_obstruction_functional)

X, Y = (1, 0), (0, 1)
DX = PolyDiffCochain.from_words(2, [X])
DY = PolyDiffCochain.from_words(2, [Y])
MU = PolyDiffCochain.mu(2)


def test_cochain_apply_examples():
    assert cochain_apply(PolyDiffCochain.from_words(2, [X, Y]), [P2("x^2"), P2("y^3")]) == P2("6*x*y^2")
    assert cochain_apply(MU, [P2("x"), P2("y")]) == P2("x*y")
    xdx = PolyDiffCochain(2, 1, {(X,): P2("x")})
    assert cochain_apply(xdx, [P2("x^2")]) == P2("2*x^2")


def test_hoch_differential_examples():
    assert hoch_differential(PolyDiffCochain.function(P2("x"))).is_zero()
    assert hoch_differential(DX).is_zero()
    d2 = PolyDiffCochain.from_words(2, [(2, 0)])
    assert hoch_differential(d2) == PolyDiffCochain.from_words(2, [X, X], coeff=-2)


def test_differential_is_mu_bracket_up_to_sign(rng):
    for arity in range(4):
        P = G.cochain(rng, 2, arity, max_coeff_degree=2, max_order=2)
        assert hoch_differential(P) == gerstenhaber_bracket(MU, P).scale(mu_bracket_sign(arity))


def test_cup_examples():
    assert cup(DX, DY) == PolyDiffCochain.from_words(2, [X, Y])
    assert cup(PolyDiffCochain.function(P2("x")), PolyDiffCochain.function(P2("y"))) == \
        PolyDiffCochain.function(P2("x*y"))
    xdx = PolyDiffCochain(2, 1, {(X,): P2("x")})
    a, b = P2("x^2*y"), P2("x*y^3")
    assert cochain_apply(cup(xdx, DY), [a, b]) == P2("x") * a.diff(0) * b.diff(1)


def test_gerstenhaber_examples():
    assert gerstenhaber_bracket(DX, DY).is_zero()
    xdx = PolyDiffCochain(2, 1, {(X,): P2("x")})
    assert gerstenhaber_bracket(xdx, DX) == DX.scale(-1)
    assert gerstenhaber_bracket(MU, MU).is_zero()


def test_chain_boundary_examples():
    x, y = P2("x"), P2("y")
    assert chain_boundary(HochChain.tensor(x, y)).is_zero()
    expected = HochChain.tensor(x * y, x) - HochChain.tensor(x, x * y) + HochChain.tensor(x * x, y)
    assert chain_boundary(HochChain.tensor(x, y, x)) == expected
    assert chain_boundary(HochChain.tensor(MultiPoly.constant(2, 1), P2("x^2 + y"))).is_zero()


def test_contraction_examples():
    x, y = P2("x"), P2("y")
    assert contraction_I(DX, HochChain.tensor(y, P2("x^2"))) == HochChain.tensor(P2("2*x*y"))
    assert contraction_I(MU, HochChain.tensor(x)).is_zero()
    z = P2("x + y")
    assert contraction_I(MU, HochChain.tensor(x, y, z)) == HochChain.tensor(x * y * z)


def test_lie_derivative_examples():
    a0, a1 = P2("x^2"), P2("x*y")
    expected = HochChain.tensor(a0.diff(0), a1) + HochChain.tensor(a0, a1.diff(0))
    assert lie_derivative_L(DX, HochChain.tensor(a0, a1)) == expected
    assert lie_derivative_L(MU, HochChain.tensor(P2("x"), P2("y"))).is_zero()
    assert lie_derivative_L(DX, HochChain.zero(2, 2)).is_zero()


def test_connes_B_examples():
    x, one = P2("x"), MultiPoly.constant(2, 1)
    assert connes_B(HochChain.tensor(x)) == HochChain.tensor(one, x) + HochChain.tensor(x, one)
    assert connes_B(connes_B(HochChain.tensor(x))).is_zero()
    assert connes_B(HochChain.zero(2, 1)).is_zero()


def test_cyclic_differential_examples(rng):
    x, one = P2("x"), MultiPoly.constant(2, 1)
    c = CyclicChain(2, 1, [HochChain.tensor(x)])
    expected = CyclicChain(2, 1, [[], [HochChain.tensor(one, x) + HochChain.tensor(x, one)]])
    assert cyclic_differential(c) == expected
    assert cyclic_differential(CyclicChain(2, 1)).is_zero()
    c = CyclicChain(2, 2, [G.chain(rng, 2, 2, 2), G.chain(rng, 2, 1, 2)])
    assert cyclic_differential(cyclic_differential(c)).is_zero()


def test_coboundary_solve_examples():
    Yc = PolyDiffCochain.from_words(2, [X, X], coeff=-2)
    res = coboundary_solve(Yc)
    assert res.solvable and hoch_differential(res.solution) == Yc
    assert res.solution == PolyDiffCochain.from_words(2, [(2, 0)])
    anti = PolyDiffCochain.from_words(2, [X, Y]) - PolyDiffCochain.from_words(2, [Y, X])
    for bounds in (Bounds(1, 1), Bounds(2, 2), Bounds()):
        res = coboundary_solve(anti, bounds)
        assert not res.solvable
        assert verify_obstruction_functional(anti, res.functional, bounds)
    res = coboundary_solve(PolyDiffCochain.zero(2, 2))
    assert res.solvable and res.solution.is_zero()


def test_coboundary_solve_random_coboundaries(rng):
    for _ in range(5):
        X0 = G.cochain(rng, 2, 1, max_coeff_degree=2, max_order=2)
        res = coboundary_solve(hoch_differential(X0))
        assert res.solvable
        assert hoch_differential(res.solution) == hoch_differential(X0)


def test_coboundary_solve_rejects_non_cocycle():
    with pytest.raises(NotACocycleError):
        coboundary_solve(PolyDiffCochain(2, 2, {(X, (0, 0)): P2("x")}))


def test_json_roundtrip(rng):
    P = G.cochain(rng, 2, 2)
    assert cochain_from_json(cochain_to_json(P)) == P
    c = G.chain(rng, 2, 2)
    assert chain_from_json(chain_to_json(c)) == c
