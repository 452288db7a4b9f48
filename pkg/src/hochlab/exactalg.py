"""Exact rational arithmetic, sparse multivariate polynomials and truncated
formal series.

Coefficients are :class:`fractions.Fraction` throughout; floats are rejected.
Monomials are exponent tuples and are ordered graded-lexicographically.
"""
from __future__ import annotations

import math
import operator
import re
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Sequence, Tuple

Rational = Fraction
Exps = Tuple[int, ...]


class DimensionError(ValueError):
    pass


class OrderMismatchError(ValueError):
    pass


def to_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"not a rational literal: {text!r}")
    value = Fraction(text)
    return value


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def grlex_key(exps: Exps):
    """Sort key for graded lexicographic order (ascending)."""
    return (sum(exps), exps)


def monomials_up_to(dim: int, max_degree: int, min_degree: int = 0) -> list:
    """All exponent tuples with ``min_degree <= |e| <= max_degree`` in grlex order."""
    out = []
    for deg in range(min_degree, max_degree + 1):
        out.extend(monomials_of_degree(dim, deg))
    return out


def monomials_of_degree(dim: int, degree: int) -> list:
    if dim == 1:
        return [(degree,)]
    out = []
    for first in range(degree + 1):
        for rest in monomials_of_degree(dim - 1, degree - first):
            out.append((first,) + rest)
    out.sort()
    return out


def falling(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1); zero when k > n."""
    if k > n:
        return 0
    out = 1
    for j in range(k):
        out *= n - j
    return out


def monomial_derivative(exps: Exps, alpha: Exps):
    """Return ``(c, e)`` with d^alpha x^exps = c x^e, or ``None`` if zero."""
    coeff = 1
    for n, k in zip(exps, alpha):
        if k > n:
            return None
        coeff *= falling(n, k)
    return coeff, tuple(n - k for n, k in zip(exps, alpha))


def add_exps(a: Exps, b: Exps) -> Exps:
    return tuple(x + y for x, y in zip(a, b))


class MultiPoly:
    """Sparse polynomial in ``dim`` variables with Fraction coefficients.

    ``terms`` maps exponent tuples to nonzero Fractions. Instances are treated
    as immutable.
    """

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms=None):
        if dim < 1:
            raise DimensionError("dimension must be positive")
        self.dim = dim
        clean: Dict[Exps, Fraction] = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != dim or any(e < 0 for e in exps):
                    raise DimensionError(f"bad exponent {exps} for dimension {dim}")
                c = to_rational(c)
                if c:
                    clean[exps] = clean.get(exps, 0) + c
                    if not clean[exps]:
                        del clean[exps]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: dict) -> "MultiPoly":
        # trusted constructor: keys valid, values nonzero Fractions
        p = object.__new__(cls)
        p.dim = dim
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, dim: int) -> "MultiPoly":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, c=1) -> "MultiPoly":
        c = to_rational(c)
        return cls._raw(dim, {(0,) * dim: c} if c else {})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "MultiPoly":
        exps = tuple(exps)
        return cls(len(exps), {exps: c})

    @classmethod
    def var(cls, dim: int, axis: int) -> "MultiPoly":
        """The coordinate x_{axis+1} (axes are 0-based)."""
        if not 0 <= axis < dim:
            raise DimensionError(f"axis {axis} out of range for dimension {dim}")
        e = [0] * dim
        e[axis] = 1
        return cls._raw(dim, {tuple(e): Fraction(1)})

    @classmethod
    def parse(cls, text: str, dim: int) -> "MultiPoly":
        return parse_poly(text, dim)

    # -- structure ---------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.dim, Fraction(0))

    def coeff(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def sorted_terms(self, descending: bool = True):
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=descending)

    def __iter__(self) -> Iterator[Tuple[Exps, Fraction]]:
        return iter(self.sorted_terms())

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            other = to_rational(other)
            if not other:
                return not self.terms
            return self.terms == {(0,) * self.dim: other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other: "MultiPoly"):
        if other.dim != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.constant(self.dim, other)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v += c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiPoly._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "MultiPoly":
        c = to_rational(c)
        if not c:
            return MultiPoly.zero(self.dim)
        if c == 1:
            return self
        return MultiPoly._raw(self.dim, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        out: Dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.dim, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = MultiPoly.constant(self.dim, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def diff(self, axis: int, times: int = 1) -> "MultiPoly":
        """Partial derivative along a 0-based axis."""
        if not 0 <= axis < self.dim:
            raise DimensionError(f"axis {axis} out of range for dimension {self.dim}")
        alpha = [0] * self.dim
        alpha[axis] = times
        return self.diff_multi(tuple(alpha))

    def diff_multi(self, alpha: Exps) -> "MultiPoly":
        """Apply the derivative word d^alpha."""
        if not any(alpha):
            return self
        out = {}
        for e, c in self.terms.items():
            r = monomial_derivative(e, alpha)
            if r is not None:
                k, e2 = r
                out[e2] = out.get(e2, 0) + c * k
        return MultiPoly._raw(self.dim, {e: c for e, c in out.items() if c})

    def drop_constant(self) -> "MultiPoly":
        zero = (0,) * self.dim
        if zero not in self.terms:
            return self
        out = dict(self.terms)
        del out[zero]
        return MultiPoly._raw(self.dim, out)

    def __call__(self, *point):
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                t *= to_rational(x) ** k
            total += t
        return total

    # -- text --------------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({self.dim}, {format_poly(self)!r})"


def poly_arith(op: str, lhs: MultiPoly, rhs) -> MultiPoly:
    """Dispatch ``add | sub | mul | scale`` on polynomials."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "scale":
        if isinstance(rhs, MultiPoly):
            raise TypeError("scale takes a rational")
        return lhs.scale(rhs)
    raise ValueError(f"unknown op {op!r}")


def poly_partial(p: MultiPoly, axis: int) -> MultiPoly:
    return p.diff(axis)


_TOKEN = re.compile(r"(\d+(?:/\d+)?)|x(\d+)(?:\^(\d+))?|([+\-*])")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        tokens.append(m.groups())
        pos = m.end()
    return tokens


def parse_poly(text: str, dim: int) -> MultiPoly:
    """Parse ``"3*x1^2*x2 - 1/2*x2^3"`` style text; variables are x1..x{dim}."""
    tokens = _tokenize(text)
    if not tokens:
        raise ValueError("empty polynomial text")
    terms: Dict[Exps, Fraction] = {}
    i = 0

    def factor(tok):
        num, var, power, op = tok
        if op is not None:
            raise ValueError(f"expected a factor, got {op!r}")
        if num is not None:
            return Fraction(num), None
        axis = int(var) - 1
        if not 0 <= axis < dim:
            raise DimensionError(f"variable x{var} out of range for dimension {dim}")
        return None, (axis, int(power) if power else 1)

    while i < len(tokens):
        sign = 1
        while i < len(tokens) and tokens[i][3] in ("+", "-"):
            if tokens[i][3] == "-":
                sign = -sign
            i += 1
        if i >= len(tokens):
            raise ValueError("polynomial text ends with an operator")
        coeff = Fraction(sign)
        exps = [0] * dim
        while True:
            c, v = factor(tokens[i])
            if c is not None:
                coeff *= c
            else:
                exps[v[0]] += v[1]
            i += 1
            if i < len(tokens) and tokens[i][3] == "*":
                i += 1
                if i >= len(tokens):
                    raise ValueError("dangling '*'")
                continue
            break
        e = tuple(exps)
        terms[e] = terms.get(e, 0) + coeff
        if i < len(tokens) and tokens[i][3] not in ("+", "-"):
            raise ValueError("missing operator between factors")
    return MultiPoly(dim, terms)


def format_monomial(exps: Exps) -> str:
    parts = []
    for i, k in enumerate(exps):
        if k == 1:
            parts.append(f"x{i + 1}")
        elif k > 1:
            parts.append(f"x{i + 1}^{k}")
    return "*".join(parts)


def format_poly(p: MultiPoly) -> str:
    if not p.terms:
        return "0"
    out = []
    for exps, c in p.sorted_terms():
        mono = format_monomial(exps)
        mag = abs(c)
        if not mono:
            body = format_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_rational(mag)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


class HbarSeries:
    """Truncated series c_0 + c_1 h + ... + c_N h^N.

    Coefficients may be any additive type that supports ``+``, unary ``-``
    and multiplication by a Fraction via ``scale`` or ``*``. The truncation
    order travels with the value; mixing orders raises.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        coeffs = tuple(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        if len(coeffs) != order + 1:
            raise ValueError(f"expected {order + 1} coefficients, got {len(coeffs)}")
        self.order = order
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value, zero, order: int) -> "HbarSeries":
        return cls((value,) + (zero,) * order, order)

    @classmethod
    def monomial(cls, value, power: int, zero, order: int) -> "HbarSeries":
        cs = [zero] * (order + 1)
        if power <= order:
            cs[power] = value
        return cls(cs, order)

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        return self.order == other.order and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self):
        return f"HbarSeries({list(self.coeffs)!r}, order={self.order})"

    def _check(self, other: "HbarSeries"):
        if not isinstance(other, HbarSeries):
            raise TypeError("expected an HbarSeries")
        if other.order != self.order:
            raise OrderMismatchError(f"truncation orders differ: {self.order} vs {other.order}")

    def map(self, fn: Callable) -> "HbarSeries":
        return HbarSeries([fn(c) for c in self.coeffs], self.order)

    def __add__(self, other):
        self._check(other)
        return HbarSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __neg__(self):
        return HbarSeries([-a for a in self.coeffs], self.order)

    def __sub__(self, other):
        self._check(other)
        return HbarSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def scale(self, c) -> "HbarSeries":
        c = to_rational(c)
        return HbarSeries([_scale(a, c) for a in self.coeffs], self.order)

    def product(self, other: "HbarSeries", mul: Callable = operator.mul) -> "HbarSeries":
        """Cauchy product truncated at the common order."""
        self._check(other)
        out = []
        for n in range(self.order + 1):
            acc = None
            for i in range(n + 1):
                term = mul(self.coeffs[i], other.coeffs[n - i])
                acc = term if acc is None else acc + term
            out.append(acc)
        return HbarSeries(out, self.order)

    def __mul__(self, other):
        if isinstance(other, HbarSeries):
            return self.product(other)
        return self.scale(other)

    def truncate(self, order: int) -> "HbarSeries":
        if order > self.order:
            raise OrderMismatchError("cannot raise the truncation order")
        return HbarSeries(self.coeffs[: order + 1], order)

    def valuation(self, is_zero: Callable = lambda c: not c) -> int | None:
        """Index of the first nonzero coefficient, or None for the zero series."""
        for k, c in enumerate(self.coeffs):
            if not is_zero(c):
                return k
        return None

    def shift(self, k: int, zero) -> "HbarSeries":
        """Multiply by h^k."""
        cs = [zero] * k + list(self.coeffs[: self.order + 1 - k])
        return HbarSeries(cs, self.order)


def _scale(a, c: Fraction):
    if hasattr(a, "scale"):
        return a.scale(c)
    return a * c


def series_exp(a: HbarSeries, one, mul: Callable = operator.mul) -> HbarSeries:
    """exp(a) truncated at a.order; ``a`` must have zero constant term."""
    if a.coeffs[0]:
        raise ValueError("exp needs a series with zero constant term")
    zero = a.coeffs[0]
    result = HbarSeries.constant(one, zero, a.order)
    power = result
    for n in range(1, a.order + 1):
        power = power.product(a, mul).scale(Fraction(1, n))
        result = result + power
    return result


def exp_minus_one_over_x(order: int) -> HbarSeries:
    """Taylor coefficients of (e^x - 1)/x, i.e. 1/(n+1)!."""
    return HbarSeries([Fraction(1, math.factorial(n + 1)) for n in range(order + 1)], order)


def series_arith(op: str, a: HbarSeries, b: HbarSeries | None = None, *, one=None,
                 mul: Callable = operator.mul) -> HbarSeries:
    """Dispatch ``add | mul | compose_exp`` on truncated series."""
    if op == "add":
        return a + b
    if op == "mul":
        return a.product(b, mul)
    if op == "compose_exp":
        if one is None:
            one = Fraction(1)
        return series_exp(a, one, mul)
    raise ValueError(f"unknown op {op!r}")


def multinomial_splits(total: int, parts: int) -> Iterable[Tuple[int, ...]]:
    """All compositions of ``total`` into ``parts`` nonnegative integers."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in multinomial_splits(total - first, parts - 1):
            yield (first,) + rest


def multinomial(total: int, split: Sequence[int]) -> int:
    out = math.factorial(total)
    for s in split:
        out //= math.factorial(s)
    return out
