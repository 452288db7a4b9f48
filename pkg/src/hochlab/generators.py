"""Seeded random generators of desk-scale algebraic objects.

Every generator takes a :class:`random.Random` so runs replay exactly.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .exactalg import MultiPoly, monomials_up_to
from .hochschild import HochChain, PolyDiffCochain
from .polyvec import ExtForm, PolyVector

COEFF_POOL = [Fraction(n, d) for n in range(-3, 4) if n for d in (1, 2, 3)]


def rational(rng: random.Random) -> Fraction:
    return rng.choice(COEFF_POOL)


def poly(rng: random.Random, dim: int, max_degree: int, n_terms: int = 3, min_degree: int = 0) -> MultiPoly:
    monos = monomials_up_to(dim, max_degree, min_degree)
    terms = {}
    for _ in range(n_terms):
        e = rng.choice(monos)
        terms[e] = terms.get(e, 0) + rational(rng)
    return MultiPoly(dim, terms)


def word(rng: random.Random, dim: int, max_order: int, min_order: int = 0):
    return rng.choice(monomials_up_to(dim, max_order, min_order))


def cochain(rng: random.Random, dim: int, arity: int, max_coeff_degree: int = 3, max_order: int = 3,
            n_terms: int = 3, normalized: bool = False) -> PolyDiffCochain:
    terms = {}
    for _ in range(n_terms):
        words = tuple(word(rng, dim, max_order, 1 if normalized else 0) for _ in range(arity))
        terms[words] = terms.get(words, MultiPoly.zero(dim)) + poly(rng, dim, max_coeff_degree, 2)
    return PolyDiffCochain(dim, arity, terms)


def chain(rng: random.Random, dim: int, arity: int, max_degree: int = 3, n_terms: int = 3) -> HochChain:
    monos = monomials_up_to(dim, max_degree)
    terms = {}
    for _ in range(n_terms):
        key = tuple(rng.choice(monos) for _ in range(arity + 1))
        terms[key] = terms.get(key, 0) + rational(rng)
    return HochChain(dim, arity, terms)


def _graded(cls, rng, dim, degree, coeff_degree, min_coeff_degree):
    axes = [tuple(sorted(rng.sample(range(dim), degree))) for _ in range(2)]
    terms = {}
    for a in axes:
        terms[a] = terms.get(a, MultiPoly.zero(dim)) + poly(rng, dim, coeff_degree, 2, min_coeff_degree)
    return cls(dim, degree, terms)


def polyvector(rng: random.Random, dim: int, degree: int, coeff_degree: int = 2,
               min_coeff_degree: int = 0) -> PolyVector:
    return _graded(PolyVector, rng, dim, degree, coeff_degree, min_coeff_degree)


def form(rng: random.Random, dim: int, degree: int, coeff_degree: int = 2) -> ExtForm:
    return _graded(ExtForm, rng, dim, degree, coeff_degree, 0)


def antisymmetric_matrix(rng: random.Random, dim: int) -> list:
    theta = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            v = rational(rng)
            theta[i][j] = v
            theta[j][i] = -v
    return theta
