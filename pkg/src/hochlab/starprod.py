"""Star products as hbar-series of bidifferential operators.

A star product ``a * b = ab + sum_k hbar^k Pi_k(a, b)`` is stored as the
series ``Pi`` (zero hbar^0 term) of arity-2 cochains.  The full product is
``m = mu + Pi``; associativity of ``m`` is the Maurer-Cartan equation for
``Pi`` in the Hochschild DG Lie algebra of :mod:`hochlab.dgla`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .dgla import gauge_action, hochschild_dgla, mc_defect
from .exactalg import DimensionError, HbarSeries, MultiPoly, OrderMismatchError, to_rational
from .hochschild import (PolyDiffCochain, cochain_apply, cochain_from_json, cochain_to_json,
                         compose_unary, insert)
from .polyvec import PolyVector, schouten_bracket

Theta = Sequence[Sequence[Fraction]]


class NotAntisymmetricError(ValueError):
    """The supplied constant bivector matrix is not antisymmetric."""


def _zero2(dim: int) -> PolyDiffCochain:
    return PolyDiffCochain.zero(dim, 2)


def _zero1(dim: int) -> PolyDiffCochain:
    return PolyDiffCochain.zero(dim, 1)


@dataclass(frozen=True)
class StarProduct:
    dim: int
    order: int
    Pi: HbarSeries

    def __post_init__(self):
        if self.Pi.order != self.order:
            raise OrderMismatchError("Pi series order differs from the star product order")
        if not self.Pi[0].is_zero():
            raise ValueError("a star product's Pi series has no hbar^0 term")
        for k, c in enumerate(self.Pi):
            if not c.is_zero() and (c.arity != 2 or c.dim != self.dim):
                raise ValueError(f"Pi_{k} must be a bidifferential operator in dimension {self.dim}")

    @classmethod
    def commutative(cls, dim: int, order: int) -> "StarProduct":
        return cls(dim, order, HbarSeries([_zero2(dim)] * (order + 1), order))

    @property
    def full(self) -> HbarSeries:
        """m = mu + Pi as a series of arity-2 cochains."""
        return HbarSeries([PolyDiffCochain.mu(self.dim)] + list(self.Pi.coeffs[1:]), self.order)

    def truncated_to(self, k: int) -> "StarProduct":
        """Keep Pi_1..Pi_k, zero the rest, same order."""
        cs = [c if i <= k else _zero2(self.dim) for i, c in enumerate(self.Pi)]
        return StarProduct(self.dim, self.order, HbarSeries(cs, self.order))


@dataclass(frozen=True)
class FormalPoisson:
    dim: int
    order: int
    pi: HbarSeries

    def __post_init__(self):
        if self.pi.order != self.order:
            raise OrderMismatchError("pi series order differs")
        if not self.pi[0].is_zero():
            raise ValueError("a formal Poisson structure has no hbar^0 term")
        for c in self.pi:
            if not c.is_zero() and c.degree != 2:
                raise ValueError("formal Poisson coefficients must be bivectors")


@dataclass(frozen=True)
class EquivalenceSeries:
    dim: int
    order: int
    T: HbarSeries

    def __post_init__(self):
        if self.T.order != self.order:
            raise OrderMismatchError("T series order differs")
        if self.T[0] != PolyDiffCochain.identity(self.dim):
            raise ValueError("an equivalence starts from the identity")
        for c in self.T:
            if not c.is_zero() and c.arity != 1:
                raise ValueError("equivalence coefficients are differential operators")

    @classmethod
    def identity(cls, dim: int, order: int) -> "EquivalenceSeries":
        return cls(dim, order, HbarSeries([PolyDiffCochain.identity(dim)] + [_zero1(dim)] * order, order))

    def compose(self, other: "EquivalenceSeries") -> "EquivalenceSeries":
        """self after other."""
        return EquivalenceSeries(self.dim, self.order, self.T.product(other.T, compose_unary))

    def inverse(self) -> "EquivalenceSeries":
        """Neumann series: T = 1 + U, T^{-1} = sum_k (-U)^k."""
        one = PolyDiffCochain.identity(self.dim)
        minus_u = HbarSeries([_zero1(self.dim)] + [-c for c in self.T.coeffs[1:]], self.order)
        result = HbarSeries([one] + [_zero1(self.dim)] * self.order, self.order)
        power = result
        for _ in range(self.order):
            power = power.product(minus_u, compose_unary)
            result = result + power
        return EquivalenceSeries(self.dim, self.order, result)


# -- construction -------------------------------------------------------------


def check_theta(theta: Theta) -> List[List[Fraction]]:
    d = len(theta)
    th = [[to_rational(v) for v in row] for row in theta]
    if any(len(row) != d for row in th):
        raise NotAntisymmetricError("theta must be a square matrix")
    for i in range(d):
        for j in range(d):
            if th[i][j] != -th[j][i]:
                raise NotAntisymmetricError(f"theta[{i}][{j}] != -theta[{j}][{i}]")
    return th


def canonical_theta(dim: int = 2) -> List[List[Fraction]]:
    """theta^{2i-1, 2i} = 1 (Darboux form)."""
    if dim % 2:
        raise ValueError("the canonical symplectic theta needs even dimension")
    th = [[Fraction(0)] * dim for _ in range(dim)]
    for i in range(0, dim, 2):
        th[i][i + 1], th[i + 1][i] = Fraction(1), Fraction(-1)
    return th


def theta_bivector(theta: Theta) -> PolyVector:
    """The constant bivector 1/2 theta^{ij} d_i ^ d_j."""
    th = check_theta(theta)
    d = len(th)
    return PolyVector(d, 2, {(i, j): th[i][j] for i in range(d) for j in range(i + 1, d) if th[i][j]})


def moyal_weyl(theta: Theta, order: int) -> StarProduct:
    """Pi_k = 1/(k! 2^k) theta^{i1 j1}..theta^{ik jk} d_{i1..ik} (x) d_{j1..jk}.

    Computed from the symbol (sum theta^{ij} xi_i eta_j)^k, a polynomial in
    the 2d commuting symbols of the left and right slots.
    """
    th = check_theta(theta)
    d = len(th)
    sym = MultiPoly.zero(2 * d)
    for i in range(d):
        for j in range(d):
            if th[i][j]:
                sym = sym + MultiPoly.var(2 * d, i) * MultiPoly.var(2 * d, d + j) * th[i][j]
    coeffs = [_zero2(d)]
    power = MultiPoly.constant(2 * d, 1)
    for k in range(1, order + 1):
        power = power * sym
        norm = Fraction(1, math.factorial(k) * 2 ** k)
        terms = {(e[:d], e[d:]): c * norm for e, c in power.terms.items()}
        coeffs.append(PolyDiffCochain(d, 2, terms))
    return StarProduct(d, order, HbarSeries(coeffs, order))


# -- evaluation -----------------------------------------------------------------

PolySeries = HbarSeries


def _poly_series(a, dim: int, order: int) -> HbarSeries:
    if isinstance(a, HbarSeries):
        if a.order != order:
            raise OrderMismatchError("operand order differs from the star product order")
        return a
    if not isinstance(a, MultiPoly):
        a = MultiPoly.constant(dim, a)
    if a.dim != dim:
        raise DimensionError("operand dimension mismatch")
    return HbarSeries.constant(a, MultiPoly.zero(dim), order)


def star_multiply(s: StarProduct, a, b) -> HbarSeries:
    """a * b = ab + sum hbar^k Pi_k(a, b) for polynomial series a, b."""
    A = _poly_series(a, s.dim, s.order)
    B = _poly_series(b, s.dim, s.order)
    zero = MultiPoly.zero(s.dim)
    out = [zero] * (s.order + 1)
    m = s.full
    for k in range(s.order + 1):
        if m[k].is_zero():
            continue
        for i in range(s.order + 1 - k):
            if not A[i]:
                continue
            for j in range(s.order + 1 - k - i):
                if B[j]:
                    out[k + i + j] = out[k + i + j] + cochain_apply(m[k], [A[i], B[j]])
    return HbarSeries(out, s.order)


def commutator_expansion(s: StarProduct, a: MultiPoly, b: MultiPoly) -> HbarSeries:
    """a * b - b * a as a truncated series."""
    return star_multiply(s, a, b) - star_multiply(s, b, a)


# -- associativity and the MC correspondence ---------------------------------------


def _is_constant(P: PolyDiffCochain) -> bool:
    return all(c.degree() <= 0 for c in P.terms.values())


class _Packed:
    """Integer-packed monomials for constant-coefficient symbol calculus.

    A monomial in ``nvars`` symbols is one int holding ``bits`` bits per
    exponent, so multiplying monomials is integer addition; coefficients are
    integers after clearing a common denominator.
    """

    def __init__(self, dim: int, max_degree: int):
        self.dim = dim
        self.bits = max(max_degree, 1).bit_length() + 1
        self.cache: Dict[tuple, Dict[int, int]] = {}

    def pack(self, exps) -> int:
        out = 0
        for k, e in enumerate(exps):
            out |= e << (self.bits * k)
        return out

    def unpack(self, code: int, nvars: int) -> Tuple[int, ...]:
        mask = (1 << self.bits) - 1
        return tuple((code >> (self.bits * k)) & mask for k in range(nvars))

    @staticmethod
    def mul(p: Dict[int, int], q: Dict[int, int]) -> Dict[int, int]:
        out: Dict[int, int] = {}
        get = out.get
        for a, ca in p.items():
            for b, cb in q.items():
                key = a + b
                out[key] = get(key, 0) + ca * cb
        return {k: v for k, v in out.items() if v}

    def slot_sum_power(self, alpha, a: int, b: int) -> Dict[int, int]:
        """(sigma_a + sigma_b)^alpha, slot symbols sigma_r = variables r*d .. r*d+d-1."""
        key = (alpha, a, b)
        out = self.cache.get(key)
        if out is None:
            out = {0: 1}
            d = self.dim
            for k, e in enumerate(alpha):
                for _ in range(e):
                    lin = {1 << (self.bits * (a * d + k)): 1, 1 << (self.bits * (b * d + k)): 1}
                    out = self.mul(out, lin)
            self.cache[key] = out
        return out


def _int_symbol(P: PolyDiffCochain, scale: int, packer: _Packed, slot_offset: int) -> Dict[int, int]:
    """scale * symbol of P, with its slots placed starting at ``slot_offset``."""
    out = {}
    d = P.dim
    for words, c in P.terms.items():
        exps = (0,) * (slot_offset * d) + tuple(e for w in words for e in w)
        v = c.constant_term() * scale
        out[packer.pack(exps)] = int(v)
    return out


def _constant_associativity_defect(s: StarProduct) -> HbarSeries:
    d, N = s.dim, s.order
    m = s.full
    denominators = [c.constant_term().denominator for P in m for c in P.terms.values()]
    L = math.lcm(*denominators) if denominators else 1
    max_deg = max((sum(sum(w) for w in words) for P in m for words in P.terms), default=0)
    packer = _Packed(d, 2 * max_deg + 1)
    nvars = 3 * d
    outer0, outer1, inner0, inner1 = [], [], [], []
    for P in m:
        # slot 0 insertion: m_i(sigma_0 + sigma_1, sigma_2); slot 1: m_i(sigma_0, sigma_1 + sigma_2)
        o0: Dict[int, int] = {}
        o1: Dict[int, int] = {}
        for words, c in P.terms.items():
            v = int(c.constant_term() * L)
            alpha, beta = words
            for key, cc in packer.slot_sum_power(alpha, 0, 1).items():
                k2 = key + packer.pack((0,) * (2 * d) + beta)
                o0[k2] = o0.get(k2, 0) + v * cc
            for key, cc in packer.slot_sum_power(beta, 1, 2).items():
                k2 = key + packer.pack(alpha)
                o1[k2] = o1.get(k2, 0) + v * cc
        outer0.append(o0)
        outer1.append(o1)
        inner0.append(_int_symbol(P, L, packer, 0))
        inner1.append(_int_symbol(P, L, packer, 1))
    out = []
    scale = Fraction(1, L * L)
    for n in range(N + 1):
        acc: Dict[int, int] = {}
        for i in range(n + 1):
            j = n - i
            for key, v in _Packed.mul(outer0[i], inner0[j]).items():
                acc[key] = acc.get(key, 0) + v
            for key, v in _Packed.mul(outer1[i], inner1[j]).items():
                acc[key] = acc.get(key, 0) - v
        terms = {}
        for key, v in acc.items():
            if v:
                e = packer.unpack(key, nvars)
                terms[(e[:d], e[d:2 * d], e[2 * d:])] = scale * v
        out.append(PolyDiffCochain(d, 3, terms))
    return HbarSeries(out, N)


def associativity_defect(s: StarProduct) -> HbarSeries:
    """(a*b)*c - a*(b*c) as a series of arity-3 cochains.

    Constant-coefficient products (Moyal) are composed through their
    symbols, where insertion becomes polynomial substitution and product;
    everything else goes through symbolic Leibniz insertion.
    """
    if all(_is_constant(c) for c in s.Pi):
        return _constant_associativity_defect(s)
    return _general_associativity_defect(s)


def _general_associativity_defect(s: StarProduct) -> HbarSeries:
    m = s.full
    N = s.order
    out = []
    for n in range(N + 1):
        acc = PolyDiffCochain.zero(s.dim, 3)
        for i in range(n + 1):
            j = n - i
            if m[i].is_zero() or m[j].is_zero():
                continue
            acc = acc + insert(m[i], 0, m[j]) - insert(m[i], 1, m[j])
        out.append(acc)
    return HbarSeries(out, N)


def is_associative(s: StarProduct) -> bool:
    return all(c.is_zero() for c in associativity_defect(s))


def mc_star_correspondence(s: StarProduct) -> HbarSeries:
    """The MC element Pi of the Hochschild DGLA packaged by the star product."""
    return s.Pi


def star_from_mc(alpha: HbarSeries, dim: int) -> StarProduct:
    """Inverse of :func:`mc_star_correspondence`."""
    return StarProduct(dim, alpha.order, alpha)


def star_mc_defect(s: StarProduct) -> HbarSeries:
    """d Pi + 1/2 [Pi, Pi] in the Hochschild DGLA; equals the associativity defect."""
    return mc_defect(hochschild_dgla(s.dim), s.Pi)


# -- equivalences -------------------------------------------------------------------


def apply_equivalence(T: EquivalenceSeries, s: StarProduct) -> StarProduct:
    """The push-forward *~ with T(a * b) = T(a) *~ T(b): m~ = T o m o (T^-1 (x) T^-1)."""
    if T.order != s.order or T.dim != s.dim:
        raise OrderMismatchError("equivalence and star product must share dimension and order")
    S = T.inverse().T
    m = s.full
    # (m o (S (x) S)) then T o (.)
    inner = m.product(S, lambda p, q: insert(p, 1, q))
    inner = inner.product(S, lambda p, q: insert(p, 0, q))
    full = T.T.product(inner, lambda t, p: insert(t, 0, p))
    mu = PolyDiffCochain.mu(s.dim)
    if full[0] != mu:
        raise AssertionError("hbar^0 term of a push-forward must be the commutative product")
    Pi = HbarSeries([_zero2(s.dim)] + list(full.coeffs[1:]), s.order)
    return StarProduct(s.dim, s.order, Pi)


def exp_equivalence(xi: HbarSeries, dim: int) -> EquivalenceSeries:
    """exp(xi) under composition, for an hbar-divisible series of operators."""
    if not xi[0].is_zero():
        raise ValueError("exp needs an hbar-divisible series")
    one = PolyDiffCochain.identity(dim)
    result = HbarSeries([one] + [_zero1(dim)] * xi.order, xi.order)
    power = result
    for n in range(1, xi.order + 1):
        power = power.product(xi, compose_unary).scale(Fraction(1, n))
        result = result + power
    return EquivalenceSeries(dim, xi.order, result)


def gauge_to_equivalence(xi: HbarSeries, dim: int) -> EquivalenceSeries:
    """The intertwiner matching gauge_action by xi: T = exp(-xi) (see CONVENTIONS)."""
    return exp_equivalence(-xi, dim)


def gauge_star(s: StarProduct, xi: HbarSeries) -> StarProduct:
    """The star product of gauge_action(xi, Pi)."""
    return star_from_mc(gauge_action(hochschild_dgla(s.dim), xi, s.Pi), s.dim)


def antisymmetric_part(P: PolyDiffCochain) -> PolyDiffCochain:
    """1/2 (P(a,b) - P(b,a)) for a bidifferential operator."""
    swapped = PolyDiffCochain(P.dim, 2, {(w[1], w[0]): c for w, c in P.terms.items()})
    return (P - swapped).scale(Fraction(1, 2))


# -- formal Poisson structures ------------------------------------------------------


def jacobi_check(p: FormalPoisson) -> HbarSeries:
    """[pi, pi]_SN as a truncated series; zero iff pi is formal Poisson."""
    return p.pi.product(p.pi, schouten_bracket)


# -- JSON ----------------------------------------------------------------------------


def star_to_json(s: StarProduct) -> dict:
    return {"dim": s.dim, "order": s.order, "Pi": [cochain_to_json(c) for c in s.Pi]}


def star_from_json(data: dict) -> StarProduct:
    dim, order = int(data["dim"]), int(data["order"])
    cs = [cochain_from_json(c) for c in data["Pi"]]
    cs = [c if not c.is_zero() else _zero2(dim) for c in cs]
    return StarProduct(dim, order, HbarSeries(cs, order))
