"""Polynomial polyvector fields and exterior forms.

A homogeneous polyvector of degree k is stored as a map from strictly
increasing k-tuples of axes to MultiPoly coefficients, meaning
``sum f_I d_{I_1} ^ .. ^ d_{I_k}``; forms use the same layout with
``dx^{I_1} ^ .. ^ dx^{I_p}``.

The Schouten-Nijenhuis bracket is computed in the odd-variable picture
(polyvectors as functions of x and odd xi_i = d_i):

    [P, Q] = sum_i dP/dxi_i . dQ/dx^i - (-1)^{(p-1)(q-1)} dQ/dxi_i . dP/dx^i

with right derivatives in xi. Contraction uses
``i_{a ^ b} = i_a o i_b`` and ``i_{d_j}`` is the left interior product.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Dict, Sequence, Tuple

from .exactalg import DimensionError, MultiPoly, parse_poly, to_rational
from .hochschild import PolyDiffCochain, word

Axes = Tuple[int, ...]


def merge_sign(a: Axes, b: Axes):
    """Sign and sorted union for xi_a ^ xi_b, or (0, None) if they overlap."""
    if set(a) & set(b):
        return 0, None
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


class _Graded:
    """Shared storage for homogeneous polyvectors and forms."""

    __slots__ = ("dim", "degree", "terms")
    kind = ""

    def __init__(self, dim: int, degree: int, terms=None):
        self.dim = dim
        self.degree = degree
        clean: Dict[Axes, MultiPoly] = {}
        for axes, coeff in (terms or {}).items():
            axes = tuple(axes)
            if len(axes) != degree:
                raise DimensionError(f"{axes} does not have {degree} axes")
            if any(not 0 <= a < dim for a in axes):
                raise DimensionError(f"axes {axes} out of range for dimension {dim}")
            if len(set(axes)) != len(axes):
                continue
            order = sorted(range(degree), key=lambda r: axes[r])
            sign = _perm_sign(order)
            if not isinstance(coeff, MultiPoly):
                coeff = MultiPoly.constant(dim, coeff)
            key = tuple(sorted(axes))
            total = clean.get(key, MultiPoly.zero(dim)) + coeff.scale(sign)
            if total:
                clean[key] = total
            else:
                clean.pop(key, None)
        self.terms = clean

    @classmethod
    def _raw(cls, dim, degree, terms):
        obj = object.__new__(cls)
        obj.dim, obj.degree, obj.terms = dim, degree, {k: v for k, v in terms.items() if v}
        return obj

    @classmethod
    def zero(cls, dim: int, degree: int):
        return cls._raw(dim, degree, {})

    @classmethod
    def function(cls, poly: MultiPoly):
        return cls._raw(poly.dim, 0, {(): poly})

    @classmethod
    def basis(cls, dim: int, *axes: int, coeff=1):
        if not isinstance(coeff, MultiPoly):
            coeff = MultiPoly.constant(dim, coeff)
        return cls(dim, len(axes), {tuple(axes): coeff})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if type(other) is not type(self):
            if isinstance(other, MultiPoly) and self.degree == 0:
                return self.terms.get((), MultiPoly.zero(self.dim)) == other
            return NotImplemented
        if not self.terms and not other.terms:
            return self.dim == other.dim
        return self.dim == other.dim and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.kind, self.dim, self.degree, frozenset(self.terms.items())))

    def _compatible(self, other):
        if type(other) is not type(self):
            raise TypeError(f"expected {type(self).__name__}")
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._compatible(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.degree != self.degree:
            raise ValueError("cannot add elements of different degree")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return type(self)._raw(self.dim, self.degree, out)

    def __neg__(self):
        return type(self)._raw(self.dim, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if isinstance(c, MultiPoly):
            return type(self)._raw(self.dim, self.degree, {k: v * c for k, v in self.terms.items()})
        c = to_rational(c)
        return type(self)._raw(self.dim, self.degree, {k: v.scale(c) for k, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def coefficient(self, *axes: int) -> MultiPoly:
        return self.terms.get(tuple(axes), MultiPoly.zero(self.dim))

    def max_coeff_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=-1)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, degree={self.degree}, {format_graded(self)})"

    def __str__(self):
        return format_graded(self)


class PolyVector(_Graded):
    kind = "d"

    @property
    def lie_degree(self) -> int:
        return self.degree - 1


class ExtForm(_Graded):
    kind = "dx"


def _perm_sign(order: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    return -1 if inv % 2 else 1


def _lift(a, cls):
    if isinstance(a, MultiPoly):
        return cls.function(a)
    return a


def wedge(a, b):
    """Exterior product of two polyvectors or of two forms."""
    cls = type(a) if isinstance(a, _Graded) else type(b)
    a, b = _lift(a, cls), _lift(b, cls)
    a._compatible(b)
    out: Dict[Axes, MultiPoly] = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            sign, key = merge_sign(ka, kb)
            if not sign:
                continue
            v = ca * cb
            if sign < 0:
                v = -v
            out[key] = out[key] + v if key in out else v
    return cls._raw(a.dim, a.degree + b.degree, out)


def _xi_right_derivative(axes: Axes, i: int):
    """Right derivative d/dxi_i of xi_axes: (sign, remaining axes) or None."""
    if i not in axes:
        return None
    r = axes.index(i)
    sign = -1 if (len(axes) - 1 - r) % 2 else 1
    return sign, axes[:r] + axes[r + 1:]


def _half_bracket(P: PolyVector, Q: PolyVector) -> Dict[Axes, MultiPoly]:
    # sum_i (dP/dxi_i)_R ^ dQ/dx^i
    out: Dict[Axes, MultiPoly] = {}
    for kp, cp in P.terms.items():
        for i in kp:
            sgn, rest = _xi_right_derivative(kp, i)
            for kq, cq in Q.terms.items():
                dq = cq.diff(i)
                if not dq:
                    continue
                sign, key = merge_sign(rest, kq)
                if not sign:
                    continue
                v = (cp * dq).scale(sgn * sign)
                out[key] = out[key] + v if key in out else v
    return out


def schouten_bracket(P, Q) -> PolyVector:
    P, Q = _lift(P, PolyVector), _lift(Q, PolyVector)
    P._compatible(Q)
    p, q = P.degree, Q.degree
    deg = p + q - 1
    if deg < 0:
        return PolyVector.zero(P.dim, 0)
    first = _half_bracket(P, Q)
    second = _half_bracket(Q, P)
    sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
    out = dict(first)
    for k, v in second.items():
        v = v.scale(sign)
        out[k] = out[k] + v if k in out else v
    return PolyVector._raw(P.dim, deg, out)


def _interior(j: int, axes: Axes):
    # i_{d_j} dx^{axes}: left interior product
    if j not in axes:
        return None
    r = axes.index(j)
    return (-1 if r % 2 else 1), axes[:r] + axes[r + 1:]


def contraction_i(gamma, omega: ExtForm) -> ExtForm:
    """i_gamma omega with i_{d_{j1} ^ .. ^ d_{jk}} = i_{d_j1} o .. o i_{d_jk}."""
    gamma = _lift(gamma, PolyVector)
    omega = _lift(omega, ExtForm)
    if gamma.dim != omega.dim:
        raise DimensionError("dimension mismatch")
    k, p = gamma.degree, omega.degree
    if k > p:
        return ExtForm.zero(omega.dim, 0)
    out: Dict[Axes, MultiPoly] = {}
    for kg, cg in gamma.terms.items():
        for kw, cw in omega.terms.items():
            sign, axes = 1, kw
            for j in reversed(kg):
                r = _interior(j, axes)
                if r is None:
                    sign = 0
                    break
                sign *= r[0]
                axes = r[1]
            if not sign:
                continue
            v = (cg * cw).scale(sign)
            out[axes] = out[axes] + v if axes in out else v
    return ExtForm._raw(omega.dim, p - k, out)


def de_rham_d(omega) -> ExtForm:
    omega = _lift(omega, ExtForm)
    out: Dict[Axes, MultiPoly] = {}
    for axes, c in omega.terms.items():
        for j in range(omega.dim):
            dc = c.diff(j)
            if not dc:
                continue
            sign, key = merge_sign((j,), axes)
            if not sign:
                continue
            v = dc.scale(sign)
            out[key] = out[key] + v if key in out else v
    return ExtForm._raw(omega.dim, omega.degree + 1, out)


def lie_derivative_l(gamma, omega) -> ExtForm:
    """l_gamma = d i_gamma - (-1)^{|gamma|} i_gamma d."""
    gamma = _lift(gamma, PolyVector)
    omega = _lift(omega, ExtForm)
    a = de_rham_d(contraction_i(gamma, omega))
    b = contraction_i(gamma, de_rham_d(omega))
    if gamma.degree % 2 == 0:
        b = -b
    if gamma.degree > omega.degree + 1:
        return ExtForm.zero(omega.dim, 0)
    return _sum_forms(omega.dim, omega.degree - gamma.degree + 1, a, b)


def _sum_forms(dim, degree, *forms):
    out = ExtForm.zero(dim, max(degree, 0))
    for f in forms:
        if f.terms:
            out = f if out.is_zero() else out + f
    return out


def hkr(gamma) -> PolyDiffCochain:
    """Antisymmetrised first-order words, normalised by 1/k!."""
    gamma = _lift(gamma, PolyVector)
    k, dim = gamma.degree, gamma.dim
    terms: Dict[tuple, MultiPoly] = {}
    norm = Fraction(1, math.factorial(k))
    for axes, c in gamma.terms.items():
        for perm in itertools.permutations(range(k)):
            sign = _perm_sign(perm)
            words = tuple(word(dim, axes[r]) for r in perm)
            v = c.scale(norm * sign)
            terms[words] = terms[words] + v if words in terms else v
    return PolyDiffCochain(dim, k, terms)


def formality_sign(k: int) -> int:
    """Decalage sign (-1)^{(k-1)(k-2)/2} relating the two bracket conventions.

    With the Leibniz-rule Schouten bracket and the insertion-formula
    Gerstenhaber bracket, ``hkr[a, b]`` and ``[hkr a, hkr b]`` agree in
    cohomology only up to ``(-1)^{(|a|-1)(|b|-1)}``; rescaling degree k by
    this sign absorbs it.  It is +1 on vector fields and bivectors.
    """
    return -1 if ((k - 1) * (k - 2) // 2) % 2 else 1


def formality_f1(gamma) -> PolyDiffCochain:
    """The first structure map F1 = formality_sign(k) * hkr on degree k."""
    gamma = _lift(gamma, PolyVector)
    return hkr(gamma).scale(formality_sign(gamma.degree))


# -- text and JSON ---------------------------------------------------------


def format_graded(g: _Graded) -> str:
    if not g.terms:
        return "0"
    sym = "d" if isinstance(g, PolyVector) else "dx"
    out = []
    for axes in sorted(g.terms):
        basis = "^".join(f"{sym}{a + 1}" for a in axes)
        c = g.terms[axes]
        out.append(f"({c})" + (f"*{basis}" if basis else ""))
    return " + ".join(out)


def parse_polyvector(text: str, dim: int, cls=PolyVector):
    """Parse ``"(x1)*d1^d2 + (2*x2)*d2^d1"``; each term is ``(poly)*axis-word``.

    Forms use ``dx1^dx2``. A bare ``(poly)`` is a degree-0 term.
    """
    import re

    sym = "dx" if cls is ExtForm else "d"
    pattern = re.compile(r"\s*([+-]?)\s*\(([^()]*)\)\s*(?:\*\s*((?:%s\d+)(?:\s*\^\s*%s\d+)*))?" % (sym, sym))
    pos = 0
    text = text.strip()
    terms: Dict[Axes, MultiPoly] = {}
    degree = None
    while pos < len(text):
        m = pattern.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse near {text[pos:]!r}")
        pos = m.end()
        sign, poly_text, basis = m.groups()
        c = parse_poly(poly_text, dim)
        if sign == "-":
            c = -c
        axes = tuple(int(t.strip()[len(sym):]) - 1 for t in basis.split("^")) if basis else ()
        if degree is None:
            degree = len(axes)
        elif degree != len(axes):
            raise ValueError("mixed degrees in one polyvector")
        terms[axes] = terms[axes] + c if axes in terms else c
    if degree is None:
        raise ValueError("empty polyvector text")
    return cls(dim, degree, terms)


def graded_to_json(g: _Graded) -> dict:
    return {
        "kind": "polyvector" if isinstance(g, PolyVector) else "form",
        "dim": g.dim,
        "degree": g.degree,
        "terms": [{"coeff": str(g.terms[a]), "axes": list(a)} for a in sorted(g.terms)],
    }


def graded_from_json(data: dict):
    cls = PolyVector if data["kind"] == "polyvector" else ExtForm
    dim = int(data["dim"])
    terms: Dict[Axes, MultiPoly] = {}
    for t in data["terms"]:
        axes = tuple(int(a) for a in t["axes"])
        terms[axes] = terms[axes] + parse_poly(t["coeff"], dim) if axes in terms else parse_poly(t["coeff"], dim)
    return cls(dim, int(data["degree"]), terms)
