"""Generic DG Lie algebra layer.

A :class:`DglaInstance` bundles a differential and a bracket on Lie-graded
elements.  Two instances ship: Hochschild cochains (Lie degree = arity - 1,
differential ``[mu, .]_G``) and polyvector fields (Lie degree = k - 1, zero
differential, Schouten bracket).  On top of any instance this module offers
Maurer-Cartan defects, twisting, the gauge action, BCH through degree 3 and
the Chevalley-Eilenberg coalgebra with its coderivation Q.

Formal series in hbar are :class:`~hochlab.exactalg.HbarSeries` whose
coefficients are elements of the instance; brackets of series are Cauchy
products truncated at the common order.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

from .exactalg import HbarSeries, MultiPoly, to_rational
from .hochschild import PolyDiffCochain, gerstenhaber_bracket
from .polyvec import PolyVector, schouten_bracket


class GradingError(ValueError):
    """An element has the wrong Lie degree for the requested operation."""


class NotMaurerCartanError(ValueError):
    """Twisting was requested by an element that does not solve the MC equation."""


class WordTooLongError(ValueError):
    """A Chevalley-Eilenberg word exceeds the configured length bound."""


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


@dataclass(frozen=True)
class DglaInstance:
    """A DG Lie algebra given by its operations.

    ``expand`` and ``element`` convert between elements and sparse
    coordinates over a monomial basis; basis keys are tuples whose second
    entry is the arity (cochains) or polyvector degree, so the Lie degree of
    a basis key is ``key[1] - 1``.
    """

    name: str
    dim: int
    differential: Callable[[Any], Any]
    bracket: Callable[[Any, Any], Any]
    lie_degree: Callable[[Any], int]
    zero: Callable[[int], Any]
    expand: Optional[Callable[[Any], List[Tuple[tuple, Fraction]]]] = None
    element: Optional[Callable[[tuple], Any]] = None
    is_zero: Callable[[Any], bool] = lambda x: x.is_zero()


# -- the two shipped instances ----------------------------------------------


def _cochain_expand(P: PolyDiffCochain):
    out = []
    for words in sorted(P.terms):
        for exps, c in P.terms[words].sorted_terms():
            out.append((("C", P.arity, words, exps), c))
    return out


def hochschild_dgla(dim: int) -> DglaInstance:
    """Polydifferential Hochschild cochains with differential ``[mu, .]_G``.

    The printed Hochschild differential differs from ``[mu, .]_G`` by the
    sign ``(-1)^(arity+1)``; the bracket-with-mu form is the one for which
    the Maurer-Cartan equation is exactly associativity (see CONVENTIONS).
    """
    mu = PolyDiffCochain.mu(dim)

    def element(key):
        _, arity, words, exps = key
        return PolyDiffCochain._raw(dim, arity, {words: MultiPoly.monomial(exps)})

    return DglaInstance(
        name="hochschild",
        dim=dim,
        differential=lambda P: gerstenhaber_bracket(mu, P),
        bracket=gerstenhaber_bracket,
        lie_degree=lambda P: P.arity - 1,
        zero=lambda deg: PolyDiffCochain.zero(dim, deg + 1),
        expand=_cochain_expand,
        element=element,
    )


def _polyvector_expand(g: PolyVector):
    out = []
    for axes in sorted(g.terms):
        for exps, c in g.terms[axes].sorted_terms():
            out.append((("V", g.degree, axes, exps), c))
    return out


def polyvector_gla(dim: int) -> DglaInstance:
    """Polyvector fields with the Schouten bracket and zero differential."""

    def element(key):
        _, degree, axes, exps = key
        return PolyVector._raw(dim, degree, {axes: MultiPoly.monomial(exps)})

    def lift(x):
        return x if isinstance(x, PolyVector) else PolyVector.function(x)

    return DglaInstance(
        name="polyvector",
        dim=dim,
        differential=lambda g: PolyVector.zero(dim, lift(g).degree),
        bracket=lambda a, b: schouten_bracket(lift(a), lift(b)),
        lie_degree=lambda g: lift(g).degree - 1,
        zero=lambda deg: PolyVector.zero(dim, deg + 1),
        expand=lambda g: _polyvector_expand(lift(g)),
        element=element,
    )


# -- structural checks ---------------------------------------------------------


def jacobi_defect(inst: DglaInstance, a, b, c):
    """(-1)^{|a||c|}[[a,b],c] + cyclic; zero for a graded Lie bracket."""
    da, db, dc = inst.lie_degree(a), inst.lie_degree(b), inst.lie_degree(c)
    br = inst.bracket
    return (br(br(a, b), c).scale(_sign(da * dc))
            + br(br(b, c), a).scale(_sign(db * da))
            + br(br(c, a), b).scale(_sign(dc * db)))


def antisymmetry_defect(inst: DglaInstance, a, b):
    """[a,b] + (-1)^{|a||b|}[b,a]."""
    s = _sign(inst.lie_degree(a) * inst.lie_degree(b))
    return inst.bracket(a, b) + inst.bracket(b, a).scale(s)


def derivation_defect(inst: DglaInstance, a, b):
    """d[a,b] - [da,b] - (-1)^{|a|}[a,db]."""
    d, br = inst.differential, inst.bracket
    return d(br(a, b)) - br(d(a), b) - br(a, d(b)).scale(_sign(inst.lie_degree(a)))


# -- formal series ------------------------------------------------------------


def _is_series(x) -> bool:
    return isinstance(x, HbarSeries)


def series_zero(inst: DglaInstance, lie_degree: int, order: int) -> HbarSeries:
    return HbarSeries.constant(inst.zero(lie_degree), inst.zero(lie_degree), order)


def series_differential(inst: DglaInstance, s: HbarSeries) -> HbarSeries:
    return s.map(inst.differential)


def series_bracket(inst: DglaInstance, a: HbarSeries, b: HbarSeries) -> HbarSeries:
    return a.product(b, inst.bracket)


def _series_is_zero(inst: DglaInstance, s) -> bool:
    if _is_series(s):
        return all(inst.is_zero(c) for c in s)
    return inst.is_zero(s)


def _check_degree(inst: DglaInstance, value, degree: int, what: str) -> None:
    coeffs = value.coeffs if _is_series(value) else (value,)
    for k, c in enumerate(coeffs):
        if not inst.is_zero(c) and inst.lie_degree(c) != degree:
            raise GradingError(f"{what}: coefficient of hbar^{k} has Lie degree "
                               f"{inst.lie_degree(c)}, expected {degree}")
    if _is_series(value) and not inst.is_zero(value.coeffs[0]):
        raise GradingError(f"{what}: the hbar^0 term must vanish")


@dataclass(frozen=True)
class McElement:
    """A candidate Maurer-Cartan element: degree 1, no hbar^0 term."""

    inst: DglaInstance
    value: HbarSeries

    def __post_init__(self):
        _check_degree(self.inst, self.value, 1, "MC element")


@dataclass(frozen=True)
class GaugeElement:
    """A degree-0 series in hbar L^0[[hbar]]."""

    inst: DglaInstance
    value: HbarSeries

    def __post_init__(self):
        _check_degree(self.inst, self.value, 0, "gauge element")


def _unwrap(x):
    return x.value if isinstance(x, (McElement, GaugeElement)) else x


def mc_defect(inst: DglaInstance, alpha):
    """d(alpha) + 1/2 [alpha, alpha] (a series if alpha is one)."""
    alpha = _unwrap(alpha)
    _check_degree(inst, alpha, 1, "MC element")
    if _is_series(alpha):
        return series_differential(inst, alpha) + series_bracket(inst, alpha, alpha).scale(Fraction(1, 2))
    return inst.differential(alpha) + inst.bracket(alpha, alpha).scale(Fraction(1, 2))


def is_maurer_cartan(inst: DglaInstance, alpha) -> bool:
    return _series_is_zero(inst, mc_defect(inst, alpha))


def twist_differential(inst: DglaInstance, alpha) -> DglaInstance:
    """The instance with differential ``d + [alpha, .]``.

    For a series alpha the twisted instance acts on series truncated at
    alpha's order; for a plain element it acts on plain elements.
    """
    alpha = _unwrap(alpha)
    if not is_maurer_cartan(inst, alpha):
        raise NotMaurerCartanError("twisting requires a Maurer-Cartan element")
    if _is_series(alpha):
        order = alpha.order

        def differential(s):
            return series_differential(inst, s) + series_bracket(inst, alpha, s)

        def degree(s):
            for c in s:
                if not inst.is_zero(c):
                    return inst.lie_degree(c)
            return 0

        return DglaInstance(
            name=f"{inst.name}+twist",
            dim=inst.dim,
            differential=differential,
            bracket=lambda a, b: series_bracket(inst, a, b),
            lie_degree=degree,
            zero=lambda deg: series_zero(inst, deg, order),
            is_zero=lambda s: _series_is_zero(inst, s),
        )
    return DglaInstance(
        name=f"{inst.name}+twist",
        dim=inst.dim,
        differential=lambda x: inst.differential(x) + inst.bracket(alpha, x),
        bracket=inst.bracket,
        lie_degree=inst.lie_degree,
        zero=inst.zero,
        expand=inst.expand,
        element=inst.element,
        is_zero=inst.is_zero,
    )


def _operator_series(inst: DglaInstance, ad: Callable, x: HbarSeries, weights: Iterable[Fraction]) -> HbarSeries:
    """sum_n w_n ad^n(x), stopping once ad^n(x) vanishes (hbar-nilpotency)."""
    total = x.scale(0)
    term = x
    for w in weights:
        if _series_is_zero(inst, term):
            break
        total = total + term.scale(w)
        term = ad(term)
    return total


def gauge_action(inst: DglaInstance, xi, alpha) -> HbarSeries:
    """exp(xi) . alpha = exp([., xi]) alpha + f([., xi]) d(xi), f(x) = (e^x - 1)/x.

    Operator series are applied on the left; ``[., xi]`` raises the
    hbar-valuation, so the sums are finite at the truncation order.
    """
    xi, alpha = _unwrap(xi), _unwrap(alpha)
    _check_degree(inst, xi, 0, "gauge element")
    _check_degree(inst, alpha, 1, "MC element")
    if xi.order != alpha.order:
        from .exactalg import OrderMismatchError
        raise OrderMismatchError("gauge element and MC element have different orders")
    n = alpha.order + 1

    def ad(s):
        return series_bracket(inst, s, xi)

    exp_w = [Fraction(1, _factorial(k)) for k in range(n + 1)]
    f_w = [Fraction(1, _factorial(k + 1)) for k in range(n + 1)]
    return (_operator_series(inst, ad, alpha, exp_w)
            + _operator_series(inst, ad, series_differential(inst, xi), f_w))


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def bch(inst: DglaInstance, x: HbarSeries, y: HbarSeries) -> HbarSeries:
    """log(e^x e^y) through bracket degree 3:
    x + y + 1/2[x,y] + 1/12([x,[x,y]] + [y,[y,x]]).

    Exact modulo hbar^4 for series without hbar^0 terms.
    """
    br = lambda a, b: series_bracket(inst, a, b)
    xy = br(x, y)
    return (x + y + xy.scale(Fraction(1, 2))
            + (br(x, xy) + br(y, br(y, x))).scale(Fraction(1, 12)))


# -- Chevalley-Eilenberg coalgebra ----------------------------------------------

DEFAULT_MAX_WORD = 4

Key = tuple
Word = Tuple[Key, ...]


def _parity(key: Key) -> int:
    # desuspended degree = Lie degree - 1 = key[1] - 2, i.e. parity of key[1]
    return key[1] % 2


def _canonical(word: Iterable[Key]) -> Tuple[int, Word]:
    """Sort a symmetric word with Koszul signs; sign 0 if it vanishes."""
    w = list(word)
    sign = 1
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            if _parity(w[j - 1]) and _parity(w[j]):
                sign = -sign
            w[j - 1], w[j] = w[j], w[j - 1]
            j -= 1
    for a, b in zip(w, w[1:]):
        if a == b and _parity(a):
            return 0, ()
    return sign, tuple(w)


class CeSum:
    """A formal rational combination of canonical CE words."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Word, Fraction]] = None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    def add_word(self, word: Iterable[Key], coeff) -> None:
        sign, w = _canonical(word)
        if not sign or not coeff:
            return
        v = self.terms.get(w, Fraction(0)) + sign * coeff
        if v:
            self.terms[w] = v
        else:
            self.terms.pop(w, None)

    def __add__(self, other: "CeSum") -> "CeSum":
        out = CeSum(dict(self.terms))
        for w, c in other.terms.items():
            out.add_word(w, c)
        return out

    def scale(self, c) -> "CeSum":
        c = to_rational(c)
        return CeSum({w: v * c for w, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, CeSum) and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def max_length(self) -> int:
        return max((len(w) for w in self.terms), default=0)


@dataclass(frozen=True)
class CeWord:
    """The symmetric product v1 ... vn of homogeneous elements in s^{-1}L."""

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a CE word has length >= 1")


def ce_expand(inst: DglaInstance, word: CeWord) -> CeSum:
    """Expand a word of elements multilinearly into canonical basis words."""
    out = CeSum()
    per_factor = [inst.expand(v) for v in word.factors]
    for combo in itertools.product(*per_factor):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        out.add_word([k for k, _ in combo], coeff)
    return out


def _as_sum(inst: DglaInstance, w) -> CeSum:
    if isinstance(w, CeSum):
        return w
    if isinstance(w, CeWord):
        return ce_expand(inst, w)
    raise TypeError("expected a CeWord or CeSum")


def _koszul_prefix(word: Word, i: int) -> int:
    return sum(_parity(word[l]) for l in range(i)) % 2


def ce_coderivation(inst: DglaInstance, w, max_length: int = DEFAULT_MAX_WORD) -> CeSum:
    """The coderivation Q with p Q(v) = -dv and p Q(v1,v2) = (-1)^{|v1|+1}[v1,v2]."""
    s = _as_sum(inst, w)
    if s.max_length() > max_length:
        raise WordTooLongError(f"CE word of length {s.max_length()} exceeds the bound {max_length}")
    out = CeSum()
    for word, coeff in s.terms.items():
        n = len(word)
        elems = [inst.element(k) for k in word]
        # linear part: -d applied to one factor, Koszul sign from the factors passed
        for i in range(n):
            sign = _sign(_koszul_prefix(word, i))
            for key, c in inst.expand(inst.differential(elems[i])):
                out.add_word(word[:i] + (key,) + word[i + 1:], -sign * coeff * c)
        # quadratic part: (2, n-2) unshuffles
        for i, j in itertools.combinations(range(n), 2):
            pi, pj = _parity(word[i]), _parity(word[j])
            moved = pi * _koszul_prefix(word, i) + pj * (_koszul_prefix(word, j) - pi)
            sign = _sign(moved) * _sign(inst.lie_degree(elems[i]) + 1)
            rest = word[:i] + word[i + 1:j] + word[j + 1:]
            for key, c in inst.expand(inst.bracket(elems[i], elems[j])):
                out.add_word((key,) + rest, sign * coeff * c)
    return out


def ce_comultiply(inst: DglaInstance, w) -> Dict[Tuple[Word, Word], Fraction]:
    """Reduced unshuffle coproduct with Koszul signs."""
    s = _as_sum(inst, w)
    out: Dict[Tuple[Word, Word], Fraction] = {}
    for word, coeff in s.terms.items():
        n = len(word)
        for k in range(1, n):
            for left in itertools.combinations(range(n), k):
                right = [r for r in range(n) if r not in left]
                perm = list(left) + right
                sign = 1
                for a in range(n):
                    for b in range(a + 1, n):
                        if perm[a] > perm[b] and _parity(word[perm[a]]) and _parity(word[perm[b]]):
                            sign = -sign
                sl, wl = _canonical(word[r] for r in left)
                sr, wr = _canonical(word[r] for r in right)
                v = sign * sl * sr * coeff
                if v:
                    key = (wl, wr)
                    total = out.get(key, Fraction(0)) + v
                    if total:
                        out[key] = total
                    else:
                        out.pop(key, None)
    return out


def _tensor_add(acc: Dict, left: CeSum, right: CeSum, coeff: Fraction) -> None:
    for wl, cl in left.terms.items():
        for wr, cr in right.terms.items():
            key = (wl, wr)
            v = acc.get(key, Fraction(0)) + coeff * cl * cr
            if v:
                acc[key] = v
            else:
                acc.pop(key, None)


def coderivation_defect(inst: DglaInstance, w, max_length: int = DEFAULT_MAX_WORD) -> Dict:
    """Delta Q - (Q (x) 1 + 1 (x) Q) Delta on ``w``; empty iff Q is a coderivation there."""
    s = _as_sum(inst, w)
    lhs = ce_comultiply(inst, ce_coderivation(inst, s, max_length))
    acc: Dict = dict(lhs)
    for (wl, wr), c in ce_comultiply(inst, s).items():
        left, right = CeSum({wl: Fraction(1)}), CeSum({wr: Fraction(1)})
        _tensor_add(acc, ce_coderivation(inst, left, max_length), right, -c)
        sign = _sign(sum(_parity(k) for k in wl))
        _tensor_add(acc, left, ce_coderivation(inst, right, max_length), -c * sign)
    return acc


def ce_square(inst: DglaInstance, w, max_length: int = DEFAULT_MAX_WORD) -> CeSum:
    """Q(Q(w)); zero when d and [,] form a DG Lie algebra."""
    return ce_coderivation(inst, ce_coderivation(inst, w, max_length), max_length)
