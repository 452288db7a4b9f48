"""Hochschild cochains and chains of the polynomial algebra Q[x1..xd].

Cochains are polydifferential operators: a term with coefficient ``c`` and
derivative words ``(w_1, .., w_k)`` sends ``(a_1, .., a_k)`` to
``c * prod_j d^{w_j} a_j``. Composition of such operators is done
symbolically with the multinomial Leibniz rule, so brackets and
differentials of cochains are again cochains in canonical form.

Chains are formal sums of tensors ``(a_0, .., a_m)``; they are stored after
multilinear expansion as tuples of monomials.

All sign conventions follow the printed formulas; see CONVENTIONS.md.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import linsolve
from .exactalg import (
    DimensionError,
    Exps,
    MultiPoly,
    add_exps,
    format_rational,
    monomial_derivative,
    monomials_up_to,
    parse_poly,
    to_rational,
)

Words = Tuple[Exps, ...]


def word(dim: int, *axes: int) -> Exps:
    """Derivative word d_{axes[0]} d_{axes[1]} ... as a multi-index (0-based axes)."""
    e = [0] * dim
    for a in axes:
        if not 0 <= a < dim:
            raise DimensionError(f"axis {a} out of range for dimension {dim}")
        e[a] += 1
    return tuple(e)


@lru_cache(maxsize=None)
def _compositions(n: int, parts: int) -> Tuple[Tuple[int, ...], ...]:
    if parts == 1:
        return ((n,),)
    out = []
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def leibniz_splits(beta: Exps, parts: int) -> Tuple[Tuple[int, Tuple[Exps, ...]], ...]:
    """All ways to distribute d^beta over ``parts`` factors, with multiplicities."""
    per_axis = []
    for b in beta:
        per_axis.append([(math.factorial(b) // math.prod(math.factorial(s) for s in split), split)
                         for split in _compositions(b, parts)])
    out = []
    for combo in itertools.product(*per_axis):
        mult = 1
        for m, _ in combo:
            mult *= m
        split = tuple(tuple(axis_split[1][p] for axis_split in combo) for p in range(parts))
        out.append((mult, split))
    return tuple(out)


class _Acc:
    """Accumulator for cochain terms keyed by words, holding raw coefficient dicts."""

    def __init__(self):
        self.data: Dict[Words, Dict[Exps, Fraction]] = {}

    def add(self, words: Words, poly_terms: dict, factor) -> None:
        slot = self.data.setdefault(words, {})
        for e, c in poly_terms.items():
            v = slot.get(e, 0) + c * factor
            if v:
                slot[e] = v
            else:
                slot.pop(e, None)

    def add_product(self, words: Words, p: dict, q: dict, factor) -> None:
        slot = self.data.setdefault(words, {})
        for e1, c1 in p.items():
            for e2, c2 in q.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = slot.get(e, 0) + c1 * c2 * factor
                if v:
                    slot[e] = v
                else:
                    slot.pop(e, None)

    def build(self, dim: int, arity: int) -> "PolyDiffCochain":
        terms = {w: MultiPoly._raw(dim, t) for w, t in self.data.items() if t}
        return PolyDiffCochain._raw(dim, arity, terms)


class PolyDiffCochain:
    """A k-ary polydifferential operator with polynomial coefficients.

    ``terms`` maps a k-tuple of derivative words (exponent tuples) to the
    nonzero MultiPoly coefficient of that word.
    """

    __slots__ = ("dim", "arity", "terms", "_hash")

    def __init__(self, dim: int, arity: int, terms=None):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        self.dim = dim
        self.arity = arity
        clean: Dict[Words, MultiPoly] = {}
        for words, coeff in (terms or {}).items():
            words = tuple(tuple(w) for w in words)
            if len(words) != arity or any(len(w) != dim for w in words):
                raise DimensionError(f"word tuple {words} does not fit arity {arity}, dimension {dim}")
            if not isinstance(coeff, MultiPoly):
                coeff = MultiPoly.constant(dim, coeff)
            if coeff.dim != dim:
                raise DimensionError("coefficient dimension mismatch")
            total = clean.get(words, MultiPoly.zero(dim)) + coeff
            if total:
                clean[words] = total
            else:
                clean.pop(words, None)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim, arity, terms):
        c = object.__new__(cls)
        c.dim, c.arity, c.terms, c._hash = dim, arity, terms, None
        return c

    # -- named cochains ----------------------------------------------------
    @classmethod
    def zero(cls, dim: int, arity: int) -> "PolyDiffCochain":
        return cls._raw(dim, arity, {})

    @classmethod
    def function(cls, poly: MultiPoly) -> "PolyDiffCochain":
        """An arity-0 cochain, i.e. an element of A."""
        return cls(poly.dim, 0, {(): poly})

    @classmethod
    def identity(cls, dim: int) -> "PolyDiffCochain":
        return cls(dim, 1, {((0,) * dim,): 1})

    @classmethod
    def mu(cls, dim: int) -> "PolyDiffCochain":
        """The multiplication of A."""
        z = (0,) * dim
        return cls(dim, 2, {(z, z): 1})

    @classmethod
    def from_words(cls, dim: int, words: Sequence[Exps], coeff=1) -> "PolyDiffCochain":
        return cls(dim, len(words), {tuple(words): coeff})

    # -- structure ---------------------------------------------------------
    @property
    def lie_degree(self) -> int:
        return self.arity - 1

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def max_order(self) -> int:
        return max((sum(w) for words in self.terms for w in words), default=0)

    def max_coeff_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=-1)

    def is_normalized(self) -> bool:
        """True if the operator vanishes when any argument is the constant 1."""
        return all(any(w) for words in self.terms for w in words) or not self.terms

    def __eq__(self, other):
        if not isinstance(other, PolyDiffCochain):
            return NotImplemented
        if not self.terms and not other.terms:
            return self.dim == other.dim
        return self.dim == other.dim and self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.arity, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"PolyDiffCochain(dim={self.dim}, arity={self.arity}, {format_cochain(self)})"

    __str__ = lambda self: format_cochain(self)

    def _compatible(self, other: "PolyDiffCochain"):
        if not isinstance(other, PolyDiffCochain):
            raise TypeError("expected a PolyDiffCochain")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._compatible(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.arity != self.arity:
            raise ValueError(f"cannot add cochains of arity {self.arity} and {other.arity}")
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out[w] + c if w in out else c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return PolyDiffCochain._raw(self.dim, self.arity, out)

    def __neg__(self):
        return PolyDiffCochain._raw(self.dim, self.arity, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PolyDiffCochain":
        if isinstance(c, MultiPoly):
            out = {w: v * c for w, v in self.terms.items()}
            return PolyDiffCochain._raw(self.dim, self.arity, {w: v for w, v in out.items() if v})
        c = to_rational(c)
        if not c:
            return PolyDiffCochain.zero(self.dim, self.arity)
        return PolyDiffCochain._raw(self.dim, self.arity, {w: v.scale(c) for w, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __call__(self, *args: MultiPoly) -> MultiPoly:
        return cochain_apply(self, args)

    def coefficients(self) -> Dict[Tuple[Exps, Words], Fraction]:
        """Flat view ``(coefficient monomial, words) -> rational``."""
        return {(e, w): c for w, p in self.terms.items() for e, c in p.terms.items()}


def cochain_apply(P: PolyDiffCochain, args: Sequence[MultiPoly]) -> MultiPoly:
    if len(args) != P.arity:
        raise ValueError(f"cochain of arity {P.arity} applied to {len(args)} arguments")
    for a in args:
        if a.dim != P.dim:
            raise DimensionError("argument dimension mismatch")
    total = MultiPoly.zero(P.dim)
    for words, c in P.terms.items():
        term = c
        for w, a in zip(words, args):
            term = term * a.diff_multi(w)
            if not term:
                break
        total = total + term
    return total


def _apply_to_monomials(P: PolyDiffCochain, monos: Sequence[Exps]) -> Dict[Exps, Fraction]:
    out: Dict[Exps, Fraction] = {}
    for words, c in P.terms.items():
        k = 1
        acc = (0,) * P.dim
        for w, e in zip(words, monos):
            r = monomial_derivative(e, w)
            if r is None:
                k = 0
                break
            k *= r[0]
            acc = add_exps(acc, r[1])
        if not k:
            continue
        for e, v in c.terms.items():
            key = add_exps(e, acc)
            s = out.get(key, 0) + v * k
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def insert(Q1: PolyDiffCochain, slot: int, Q2: PolyDiffCochain) -> PolyDiffCochain:
    """The operator ``Q1(.., Q2(..), ..)`` with Q2's output placed in ``slot``."""
    Q1._compatible(Q2)
    if not 0 <= slot < Q1.arity:
        raise ValueError(f"slot {slot} out of range for arity {Q1.arity}")
    n2 = Q2.arity
    acc = _Acc()
    for w1, c1 in Q1.terms.items():
        beta = w1[slot]
        head, tail = w1[:slot], w1[slot + 1:]
        splits = leibniz_splits(beta, n2 + 1)
        for w2, c2 in Q2.terms.items():
            for mult, parts in splits:
                dc2 = c2.diff_multi(parts[0])
                if not dc2:
                    continue
                mid = tuple(add_exps(w, p) for w, p in zip(w2, parts[1:]))
                acc.add_product(head + mid + tail, c1.terms, dc2.terms, mult)
    return acc.build(Q1.dim, Q1.arity + n2 - 1)


def compose_unary(T1: PolyDiffCochain, T2: PolyDiffCochain) -> PolyDiffCochain:
    """Operator composition T1 after T2 for arity-1 cochains."""
    return insert(T1, 0, T2)


def cup(P1: PolyDiffCochain, P2: PolyDiffCochain) -> PolyDiffCochain:
    P1._compatible(P2)
    acc = _Acc()
    for w1, c1 in P1.terms.items():
        for w2, c2 in P2.terms.items():
            acc.add_product(w1 + w2, c1.terms, c2.terms, 1)
    return acc.build(P1.dim, P1.arity + P2.arity)


def pre_lie(Q1: PolyDiffCochain, Q2: PolyDiffCochain) -> PolyDiffCochain:
    """sum_i (-1)^{i k2} Q1(.., Q2(a_i..), ..) with k2 the Lie degree of Q2."""
    k2 = Q2.arity - 1
    out = PolyDiffCochain.zero(Q1.dim, Q1.arity + Q2.arity - 1)
    for i in range(Q1.arity):
        term = insert(Q1, i, Q2)
        out = out + (term if (i * k2) % 2 == 0 else -term)
    return out


def gerstenhaber_bracket(Q1: PolyDiffCochain, Q2: PolyDiffCochain) -> PolyDiffCochain:
    Q1._compatible(Q2)
    k1, k2 = Q1.arity - 1, Q2.arity - 1
    left = pre_lie(Q1, Q2)
    right = pre_lie(Q2, Q1)
    out = left - right if (k1 * k2) % 2 == 0 else left + right
    if out.is_zero():
        return PolyDiffCochain.zero(Q1.dim, max(Q1.arity + Q2.arity - 1, 0))
    return out


def hoch_differential(P: PolyDiffCochain) -> PolyDiffCochain:
    """Hochschild coboundary, summand by summand as printed.

    (dP)(a_0..a_k) = a_0 P(a_1..a_k) + sum_i (-1)^{i+1} P(.., a_i a_{i+1}, ..)
                     + (-1)^{k+1} P(a_0..a_{k-1}) a_k
    """
    k = P.arity
    z = (0,) * P.dim
    acc = _Acc()
    for words, c in P.terms.items():
        acc.add((z,) + words, c.terms, 1)
        acc.add(words + (z,), c.terms, (-1) ** (k + 1))
    out = acc.build(P.dim, k + 1)
    mu = PolyDiffCochain.mu(P.dim)
    for i in range(k):
        term = insert(P, i, mu)
        out = out + (term if i % 2 else -term)
    if out.is_zero():
        return PolyDiffCochain.zero(P.dim, k + 1)
    return out


def mu_bracket_sign(arity: int) -> int:
    """The sign s with hoch_differential(P) == s * [mu, P]_G for P of this arity."""
    return 1 if arity % 2 == 1 else -1


# ---------------------------------------------------------------------------
# chains


class HochChain:
    """A formal sum of tensors (a_0, .., a_m) expanded over monomials."""

    __slots__ = ("dim", "arity", "terms", "_hash")

    def __init__(self, dim: int, arity: int, terms=None):
        self.dim = dim
        self.arity = arity
        clean: Dict[Tuple[Exps, ...], Fraction] = {}
        for key, w in (terms or {}).items():
            key = tuple(tuple(e) for e in key)
            if len(key) != arity + 1 or any(len(e) != dim for e in key):
                raise DimensionError(f"tensor {key} does not fit arity {arity}")
            w = to_rational(w)
            v = clean.get(key, 0) + w
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim, arity, terms):
        c = object.__new__(cls)
        c.dim, c.arity, c.terms, c._hash = dim, arity, terms, None
        return c

    @classmethod
    def zero(cls, dim: int, arity: int) -> "HochChain":
        return cls._raw(dim, arity, {})

    @classmethod
    def from_tensors(cls, dim: int, items: Iterable[Tuple[object, Sequence[MultiPoly]]]) -> "HochChain":
        """Build ``sum weight * (p_0, .., p_m)`` from polynomial tensors."""
        items = list(items)
        if not items:
            raise ValueError("use HochChain.zero for an empty chain")
        arity = len(items[0][1]) - 1
        terms: Dict[Tuple[Exps, ...], Fraction] = {}
        for weight, polys in items:
            if len(polys) != arity + 1:
                raise ValueError("tensors of mixed arity")
            weight = to_rational(weight)
            for combo in itertools.product(*(p.terms.items() for p in polys)):
                key = tuple(e for e, _ in combo)
                v = weight
                for _, c in combo:
                    v *= c
                terms[key] = terms.get(key, 0) + v
        return cls(dim, arity, terms)

    @classmethod
    def tensor(cls, *polys: MultiPoly) -> "HochChain":
        return cls.from_tensors(polys[0].dim, [(1, polys)])

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    @property
    def degree(self) -> int:
        """Degree in the reversed grading."""
        return -self.arity

    def __eq__(self, other):
        if not isinstance(other, HochChain):
            return NotImplemented
        if not self.terms and not other.terms:
            return self.dim == other.dim
        return self.dim == other.dim and self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.arity, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"HochChain(dim={self.dim}, arity={self.arity}, {format_chain(self)})"

    __str__ = lambda self: format_chain(self)

    def __add__(self, other):
        if not isinstance(other, HochChain):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionError("dimension mismatch")
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.arity != self.arity:
            raise ValueError(f"cannot add chains of arity {self.arity} and {other.arity}")
        out = dict(self.terms)
        _merge(out, other.terms, 1)
        return HochChain._raw(self.dim, self.arity, out)

    def __neg__(self):
        return HochChain._raw(self.dim, self.arity, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "HochChain":
        c = to_rational(c)
        if not c:
            return HochChain.zero(self.dim, self.arity)
        return HochChain._raw(self.dim, self.arity, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__


def _merge(target: dict, source: dict, factor) -> None:
    for k, v in source.items():
        s = target.get(k, 0) + v * factor
        if s:
            target[k] = s
        else:
            target.pop(k, None)


def _add_term(target: dict, key, v) -> None:
    s = target.get(key, 0) + v
    if s:
        target[key] = s
    else:
        target.pop(key, None)


def chain_boundary(c: HochChain) -> HochChain:
    """Hochschild boundary including the wrap-around term (a_m a_0, a_1, ..)."""
    m = c.arity
    if m == 0:
        return HochChain.zero(c.dim, 0)
    out: dict = {}
    for t, w in c.terms.items():
        for i in range(m):
            key = t[:i] + (add_exps(t[i], t[i + 1]),) + t[i + 2:]
            _add_term(out, key, w if i % 2 == 0 else -w)
        key = (add_exps(t[m], t[0]),) + t[1:m]
        _add_term(out, key, w if m % 2 == 0 else -w)
    return HochChain._raw(c.dim, m - 1, out)


def contraction_I(P: PolyDiffCochain, c: HochChain) -> HochChain:
    if P.dim != c.dim:
        raise DimensionError("dimension mismatch")
    k, m = P.arity, c.arity
    if m < k:
        return HochChain.zero(c.dim, max(m - k, 0))
    out: dict = {}
    for t, w in c.terms.items():
        val = _apply_to_monomials(P, t[1:k + 1])
        rest = t[k + 1:]
        for e, v in val.items():
            _add_term(out, (add_exps(t[0], e),) + rest, w * v)
    return HochChain._raw(c.dim, m - k, out)


def lie_derivative_L(Q: PolyDiffCochain, c: HochChain) -> HochChain:
    """Lie derivative of chains along Q, both printed sums including wrap-around."""
    if Q.dim != c.dim:
        raise DimensionError("dimension mismatch")
    k = Q.arity - 1
    m = c.arity
    if m < k or not Q.terms or not c.terms:
        return HochChain.zero(c.dim, max(m - k, 0))
    out: dict = {}
    for t, w in c.terms.items():
        for i in range(1 if k < 0 else 0, m - k + 1):
            val = _apply_to_monomials(Q, t[i:i + k + 1])
            sign = -1 if (k * i) % 2 else 1
            head, tail = t[:i], t[i + k + 1:]
            for e, v in val.items():
                _add_term(out, head + (e,) + tail, sign * w * v)
        for j in range(max(m - k, 0), m):
            args = t[j + 1:] + t[:k + j - m + 1]
            val = _apply_to_monomials(Q, args)
            sign = -1 if (m * (j + 1)) % 2 else 1
            rest = t[k + j + 1 - m:j + 1]
            for e, v in val.items():
                _add_term(out, (e,) + rest, sign * w * v)
    return HochChain._raw(c.dim, m - k, out)


def connes_B(c: HochChain) -> HochChain:
    m = c.arity
    one = (0,) * c.dim
    out: dict = {}
    for t, w in c.terms.items():
        for i in range(m + 1):
            sign = -1 if (m * i) % 2 else 1
            rot = t[i:] + t[:i]
            _add_term(out, (one,) + rot, sign * w)
            _add_term(out, (rot[0], one) + rot[1:], sign * w)
    return HochChain._raw(c.dim, m + 1, out)


# ---------------------------------------------------------------------------
# negative cyclic complex


class CyclicChain:
    """A u-polynomial sum_j u^j c_j of chains, truncated at ``u_order``.

    Each coefficient is a dict ``arity -> HochChain`` so mixed arities are
    allowed within one power of u.
    """

    __slots__ = ("dim", "u_order", "coeffs")

    def __init__(self, dim: int, u_order: int, coeffs: Sequence[Iterable[HochChain]] = ()):
        self.dim = dim
        self.u_order = u_order
        cs: List[Dict[int, HochChain]] = [dict() for _ in range(u_order + 1)]
        for j, chains in enumerate(coeffs):
            if j > u_order:
                break
            if isinstance(chains, HochChain):
                chains = [chains]
            for ch in chains:
                _cyc_add(cs[j], ch)
        self.coeffs = tuple(cs)

    def __eq__(self, other):
        if not isinstance(other, CyclicChain):
            return NotImplemented
        return self.dim == other.dim and self.u_order == other.u_order and self.coeffs == other.coeffs

    def is_zero(self) -> bool:
        return all(not d for d in self.coeffs)

    def __add__(self, other):
        if self.u_order != other.u_order:
            raise ValueError("u truncation orders differ")
        out = CyclicChain(self.dim, self.u_order)
        for j in range(self.u_order + 1):
            for ch in list(self.coeffs[j].values()) + list(other.coeffs[j].values()):
                _cyc_add(out.coeffs[j], ch)
        return out

    def __repr__(self):
        parts = []
        for j, d in enumerate(self.coeffs):
            for m in sorted(d):
                parts.append(f"u^{j}*[{format_chain(d[m])}]")
        return "CyclicChain(" + (" + ".join(parts) or "0") + ")"


def _cyc_add(slot: Dict[int, HochChain], ch: HochChain) -> None:
    if ch.is_zero():
        return
    cur = slot.get(ch.arity)
    total = ch if cur is None else cur + ch
    if total.is_zero():
        slot.pop(ch.arity, None)
    else:
        slot[ch.arity] = total


def cyclic_differential(c: CyclicChain) -> CyclicChain:
    """Apply d + uB power by power, truncating at u_order."""
    out = CyclicChain(c.dim, c.u_order)
    for j, chains in enumerate(c.coeffs):
        for ch in chains.values():
            _cyc_add(out.coeffs[j], chain_boundary(ch))
            if j + 1 <= c.u_order:
                _cyc_add(out.coeffs[j + 1], connes_B(ch))
    return out


# ---------------------------------------------------------------------------
# coboundary solving


@dataclass(frozen=True)
class Bounds:
    """Truncation profile for an unknown cochain."""

    max_coeff_degree: int = 4
    max_order: int = 4


@dataclass
class CoboundaryResult:
    """Either a cochain X with dX = Y, or a functional certifying that none exists.

    ``functional`` maps ``(coefficient monomial, words)`` keys to rationals; it
    vanishes on the image of the differential (within the bounds) and pairs
    nontrivially with Y.
    """

    solvable: bool
    solution: Optional[PolyDiffCochain] = None
    functional: Optional[Dict[Tuple[Exps, Words], Fraction]] = None

    def __bool__(self):
        return self.solvable


class NotACocycleError(ValueError):
    pass


def _words_with_total(alpha: Exps, slots: int, max_order: int):
    for mult, parts in leibniz_splits(alpha, slots):
        if all(sum(p) <= max_order for p in parts):
            yield parts


def coboundary_solve(Y: PolyDiffCochain, bounds: Bounds = Bounds(), check_cocycle: bool = True) -> CoboundaryResult:
    """Find X (arity k-1) with hoch_differential(X) == Y, within ``bounds``.

    The differential is linear over polynomial coefficients and preserves the
    total derivative multi-index, so the unknowns split into independent
    blocks keyed by (coefficient monomial, total multi-index).
    """
    if Y.arity == 0:
        raise ValueError("an arity-0 cochain is never a coboundary target")
    if check_cocycle and not hoch_differential(Y).is_zero():
        raise NotACocycleError("target is not a Hochschild cocycle")
    dim, k = Y.dim, Y.arity - 1
    if Y.is_zero():
        return CoboundaryResult(True, solution=PolyDiffCochain.zero(dim, k))
    flat = Y.coefficients()
    blocks: Dict[Tuple[Exps, Exps], list] = {}
    for (e, words) in flat:
        total = (0,) * dim
        for w in words:
            total = add_exps(total, w)
        blocks.setdefault((e, total), []).append(words)
    rows: List[linsolve.Row] = []
    row_keys: List[Tuple[Exps, Words]] = []
    image_cache: Dict[Words, PolyDiffCochain] = {}
    for (e, total) in sorted(blocks):
        unknowns = []
        if sum(e) <= bounds.max_coeff_degree:
            unknowns = list(_words_with_total(total, k, bounds.max_order)) if k > 0 else (
                [()] if not any(total) else [])
        columns: Dict[Words, Dict[Words, Fraction]] = {}
        for u in unknowns:
            img = image_cache.get(u)
            if img is None:
                img = hoch_differential(PolyDiffCochain._raw(dim, k, {u: MultiPoly.constant(dim, 1)}))
                image_cache[u] = img
            for words, c in img.terms.items():
                columns.setdefault(words, {})[(e, u)] = c.constant_term()
        targets = set(columns) | {w for (ee, w) in flat if ee == e and _total(w, dim) == total}
        for words in sorted(targets):
            rows.append((columns.get(words, {}), flat.get((e, words), Fraction(0))))
            row_keys.append((e, words))
    res = linsolve.solve(rows)
    if res.solvable:
        terms: Dict[Words, Dict[Exps, Fraction]] = {}
        for (e, u), v in res.solution.items():
            if v:
                terms.setdefault(u, {})[e] = v
        X = PolyDiffCochain(dim, k, {u: MultiPoly(dim, t) for u, t in terms.items()})
        return CoboundaryResult(True, solution=X)
    functional = {row_keys[i]: y for i, y in res.witness.items()}
    return CoboundaryResult(False, functional=functional)


def _total(words: Words, dim: int) -> Exps:
    total = (0,) * dim
    for w in words:
        total = add_exps(total, w)
    return total


def verify_obstruction_functional(Y: PolyDiffCochain, functional: dict, bounds: Bounds) -> bool:
    """Re-check a coboundary certificate: it must kill every d(basis) and not Y."""
    dim, k = Y.dim, Y.arity - 1
    flat = Y.coefficients()
    if sum(functional.get(key, 0) * v for key, v in flat.items()) == 0:
        return False
    for (e, total) in {(e, _total(w, dim)) for (e, w) in functional}:
        if sum(e) > bounds.max_coeff_degree:
            continue
        unknowns = list(_words_with_total(total, k, bounds.max_order)) if k > 0 else (
            [()] if not any(total) else [])
        for u in unknowns:
            img = hoch_differential(PolyDiffCochain._raw(dim, k, {u: MultiPoly.monomial(e)}))
            pairing = sum(functional.get(key, 0) * v for key, v in img.coefficients().items())
            if pairing:
                return False
    return True


def _tensors_with_total(total: Exps, slots: int):
    for _, parts in leibniz_splits(total, slots):
        yield parts


def chain_boundary_solve(target: HochChain) -> Optional[HochChain]:
    """Find z with chain_boundary(z) == target, or None if none exists.

    The boundary preserves the product of all tensor factors, so the search
    space for each multidegree is finite and exhaustive.
    """
    dim, m = target.dim, target.arity
    if target.is_zero():
        return HochChain.zero(dim, m + 1)
    totals = sorted({_total(t, dim) for t in target.terms})
    rows: List[linsolve.Row] = []
    for total in totals:
        columns: Dict[Tuple[Exps, ...], Dict] = {}
        for t in _tensors_with_total(total, m + 2):
            img = chain_boundary(HochChain._raw(dim, m + 1, {t: Fraction(1)}))
            for key, v in img.terms.items():
                columns.setdefault(key, {})[t] = v
        keys = set(columns) | {t for t in target.terms if _total(t, dim) == total}
        for key in sorted(keys):
            rows.append((columns.get(key, {}), target.terms.get(key, Fraction(0))))
    res = linsolve.solve(rows)
    if not res.solvable:
        return None
    return HochChain(dim, m + 1, {t: v for t, v in res.solution.items() if v})


# ---------------------------------------------------------------------------
# text and JSON


def format_word(w: Exps) -> str:
    parts = []
    for i, k in enumerate(w):
        parts.extend([f"d{i + 1}"] * k)
    return "".join(parts) or "1"


def format_cochain(P: PolyDiffCochain) -> str:
    if not P.terms:
        return "0"
    out = []
    for words in sorted(P.terms):
        c = P.terms[words]
        ws = " (x) ".join(format_word(w) for w in words) if words else "[]"
        out.append(f"({c})*[{ws}]")
    return " + ".join(out)


def format_chain(c: HochChain) -> str:
    from .exactalg import format_monomial

    if not c.terms:
        return "0"
    out = []
    for key in sorted(c.terms):
        w = c.terms[key]
        ts = ", ".join(format_monomial(e) or "1" for e in key)
        out.append(f"{format_rational(w)}*({ts})")
    return " + ".join(out)


def cochain_to_json(P: PolyDiffCochain) -> dict:
    return {
        "dim": P.dim,
        "arity": P.arity,
        "terms": [{"coeff": str(P.terms[w]), "words": [list(x) for x in w]} for w in sorted(P.terms)],
    }


def cochain_from_json(data: dict) -> PolyDiffCochain:
    dim, arity = int(data["dim"]), int(data["arity"])
    terms: Dict[Words, MultiPoly] = {}
    for t in data["terms"]:
        words = tuple(tuple(int(v) for v in w) for w in t["words"])
        terms[words] = terms.get(words, MultiPoly.zero(dim)) + parse_poly(t["coeff"], dim)
    return PolyDiffCochain(dim, arity, terms)


def chain_to_json(c: HochChain) -> dict:
    from .exactalg import format_monomial

    return {
        "dim": c.dim,
        "arity": c.arity,
        "terms": [
            {"weight": format_rational(c.terms[key]),
             "tensors": [format_monomial(e) or "1" for e in key]}
            for key in sorted(c.terms)
        ],
    }


def chain_from_json(data: dict) -> HochChain:
    dim, arity = int(data["dim"]), int(data["arity"])
    items = [(to_rational(t["weight"]), [parse_poly(s, dim) for s in t["tensors"]]) for t in data["terms"]]
    if not items:
        return HochChain.zero(dim, arity)
    ch = HochChain.from_tensors(dim, items)
    if ch.is_zero():
        return HochChain.zero(dim, arity)
    return ch
