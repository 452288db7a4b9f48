"""The Vey cocycle on A/K and the exact coboundary system V = delta P.

Everything lives in A/K, realised by polynomials without constant term.
A linear map P on A/K is truncated to the monomial basis of degrees 1..D,
with values spanned by monomials of degrees 1..D.  The unknown u(m, t) is
the coefficient of monomial t in P(m).  For every monomial pair (a, b) with
deg a + deg b <= Dpairs, the equation

    V(a, b) = P({a, b}) - {P(a), b} - {a, P(b)}    (mod constants)

contributes one row per non-constant target monomial.

Because the bracket is homogeneous of degree -2 and V of degree -6, the
equation splits by degree shift; the Vey part only meets the shift -4
component of P, whose values have degree <= D - 4.  Hence infeasibility of
the truncated system implies infeasibility without truncation.
"""
from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

from . import linsolve
from .exactalg import (DimensionError, MultiPoly, format_monomial, format_poly, format_rational,
                       grlex_key, monomials_of_degree, monomials_up_to, parse_poly, parse_rational)
from .starprod import canonical_theta, check_theta

Exps = Tuple[int, ...]


class BoundsError(ValueError):
    """The truncation bounds are inconsistent."""


# -- A/K -------------------------------------------------------------------------


class PoissonFunctionClass:
    """A class in A/K, stored as its representative without constant term."""

    __slots__ = ("rep",)

    def __init__(self, poly: MultiPoly):
        self.rep = poly.drop_constant()

    @property
    def dim(self) -> int:
        return self.rep.dim

    def __eq__(self, other):
        if isinstance(other, PoissonFunctionClass):
            return self.rep == other.rep
        if isinstance(other, MultiPoly):
            return self.rep == other.drop_constant()
        return NotImplemented

    def __hash__(self):
        return hash(self.rep)

    def __add__(self, other):
        return PoissonFunctionClass(self.rep + _rep(other))

    def __sub__(self, other):
        return PoissonFunctionClass(self.rep - _rep(other))

    def __neg__(self):
        return PoissonFunctionClass(-self.rep)

    def scale(self, c):
        return PoissonFunctionClass(self.rep.scale(c))

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def __bool__(self):
        return bool(self.rep)

    def __str__(self):
        return str(self.rep)

    def __repr__(self):
        return f"PoissonFunctionClass({self.rep})"


def _rep(a) -> MultiPoly:
    return a.rep if isinstance(a, PoissonFunctionClass) else a


def _theta(theta) -> List[List[Fraction]]:
    return check_theta(theta)


def raw_poisson_bracket(theta, a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """theta^{ij} d_i a d_j b, without projection."""
    th = _theta(theta)
    a, b = _rep(a), _rep(b)
    d = len(th)
    if a.dim != d or b.dim != d:
        raise DimensionError("bracket operands must live in the dimension of theta")
    out = MultiPoly.zero(d)
    for i in range(d):
        da = a.diff(i)
        if not da:
            continue
        for j in range(d):
            if th[i][j]:
                out = out + (da * b.diff(j)).scale(th[i][j])
    return out


def poisson_bracket(theta, a, b) -> PoissonFunctionClass:
    """{a, b} = theta^{ij} d_i a d_j b in A/K."""
    return PoissonFunctionClass(raw_poisson_bracket(theta, a, b))


def vey_cocycle(theta, a, b) -> PoissonFunctionClass:
    """V(a,b) in A/K; see :func:`raw_vey_cocycle`."""
    return PoissonFunctionClass(raw_vey_cocycle(theta, a, b))


def raw_vey_cocycle(theta, a, b) -> MultiPoly:
    """V(a,b) = 1/24 theta^{i1j1} theta^{i2j2} theta^{i3j3} d^3_{i} a d^3_{j} b (general d),
    as a polynomial (constant term kept)."""
    th = _theta(theta)
    a, b = _rep(a), _rep(b)
    d = len(th)
    if a.dim != d or b.dim != d:
        raise DimensionError("cocycle operands must live in the dimension of theta")
    out = MultiPoly.zero(d)
    pairs = [(i, j) for i in range(d) for j in range(d) if th[i][j]]
    for (i1, j1), (i2, j2), (i3, j3) in itertools.product(pairs, repeat=3):
        alpha = [0] * d
        beta = [0] * d
        for i in (i1, i2, i3):
            alpha[i] += 1
        for j in (j1, j2, j3):
            beta[j] += 1
        da = a.diff_multi(tuple(alpha))
        if not da:
            continue
        db = b.diff_multi(tuple(beta))
        if db:
            out = out + (da * db).scale(th[i1][j1] * th[i2][j2] * th[i3][j3])
    return out.scale(Fraction(1, 24))


def vey_cocycle_2d(a, b) -> MultiPoly:
    """The canonical two-dimensional form:
    1/24 (a_xxx b_yyy - 3 a_xxy b_xyy + 3 a_xyy b_xxy - a_yyy b_xxx)."""
    a, b = _rep(a), _rep(b)
    if a.dim != 2 or b.dim != 2:
        raise DimensionError("the 2D Vey formula needs dimension 2")
    D = lambda p, i, j: p.diff_multi((i, j))
    out = (D(a, 3, 0) * D(b, 0, 3) - (D(a, 2, 1) * D(b, 1, 2)).scale(3)
           + (D(a, 1, 2) * D(b, 2, 1)).scale(3) - D(a, 0, 3) * D(b, 3, 0))
    return out.scale(Fraction(1, 24))


def ce2_cocycle_defect(theta, a, b, c) -> PoissonFunctionClass:
    """{a,V(b,c)} - {b,V(a,c)} + {c,V(a,b)} - V({a,b},c) + V({a,c},b) - V({b,c},a)."""
    br = lambda p, q: poisson_bracket(theta, p, q)
    V = lambda p, q: vey_cocycle(theta, p, q)
    return (br(a, V(b, c)) - br(b, V(a, c)) + br(c, V(a, b))
            - V(br(a, b), c) + V(br(a, c), b) - V(br(b, c), a))


# -- linear maps on A/K --------------------------------------------------------------


@dataclass
class LinearMapTable:
    """A linear map on A/K given on monomials of degree 1..D."""

    dim: int
    max_degree: int
    entries: Dict[Exps, MultiPoly] = field(default_factory=dict)

    def __call__(self, p) -> MultiPoly:
        p = _rep(p)
        out = MultiPoly.zero(self.dim)
        for e, c in p.terms.items():
            if sum(e) == 0:
                continue
            if sum(e) > self.max_degree:
                raise BoundsError(f"monomial {format_monomial(e)} exceeds the table degree {self.max_degree}")
            v = self.entries.get(e)
            if v is not None:
                out = out + v.scale(c)
        return out.drop_constant()

    @classmethod
    def from_unknowns(cls, dim: int, max_degree: int, values: Dict[Tuple[Exps, Exps], Fraction]) -> "LinearMapTable":
        entries: Dict[Exps, Dict[Exps, Fraction]] = {}
        for (m, t), v in values.items():
            if v:
                entries.setdefault(m, {})[t] = v
        return cls(dim, max_degree, {m: MultiPoly(dim, t) for m, t in entries.items()})

    def unknowns(self) -> Dict[Tuple[Exps, Exps], Fraction]:
        return {(m, t): c for m, p in self.entries.items() for t, c in p.terms.items()}

    def to_json(self) -> dict:
        return {format_monomial(m): str(self.entries[m]) for m in sorted(self.entries, key=grlex_key)
                if self.entries[m]}


def coboundary(theta, P: Callable[[MultiPoly], MultiPoly], a, b) -> PoissonFunctionClass:
    """(delta P)(a,b) = P({a,b}) - {P(a),b} - {a,P(b)} in A/K."""
    br = lambda p, q: raw_poisson_bracket(theta, p, q)
    a, b = _rep(a), _rep(b)
    return PoissonFunctionClass(P(br(a, b).drop_constant()) - br(P(a), b) - br(a, P(b)))


def random_table(rng, dim: int, max_degree: int, n_entries: int = 6) -> LinearMapTable:
    """A seeded random linear map with values of degree 1..max_degree."""
    from . import generators

    monos = monomials_up_to(dim, max_degree, 1)
    entries: Dict[Exps, MultiPoly] = {}
    for _ in range(n_entries):
        m = rng.choice(monos)
        entries[m] = entries.get(m, MultiPoly.zero(dim)) + generators.poly(rng, dim, max_degree, 2, 1)
    return LinearMapTable(dim, max_degree, entries)


# -- the coboundary system ------------------------------------------------------------


Column = Tuple[Exps, Exps]


@dataclass
class LinearSystem:
    """Rows ``sum coeffs[u] * u = rhs`` over the unknowns u(m, t)."""

    theta: List[List[Fraction]]
    D: int
    Dpairs: int
    unknowns: List[Column]
    rows: List[linsolve.Row]
    provenance: List[tuple]

    @property
    def dim(self) -> int:
        return len(self.theta)

    def row_index(self) -> Dict[tuple, int]:
        return {p: i for i, p in enumerate(self.provenance)}

    def add_rows(self, rows: Sequence[linsolve.Row], provenance: Sequence[tuple]) -> "LinearSystem":
        return LinearSystem(self.theta, self.D, self.Dpairs, self.unknowns,
                            list(self.rows) + list(rows), list(self.provenance) + list(provenance))

    def restrict(self, keep: Callable[[tuple], bool]) -> "LinearSystem":
        pairs = [(r, p) for r, p in zip(self.rows, self.provenance) if keep(p)]
        return LinearSystem(self.theta, self.D, self.Dpairs, self.unknowns,
                            [r for r, _ in pairs], [p for _, p in pairs])


def monomial_pairs(dim: int, D: int, Dpairs: int) -> List[Tuple[Exps, Exps]]:
    """Pairs a < b (grlex) of monomials of degree 1..D with deg a + deg b <= Dpairs."""
    monos = sorted(monomials_up_to(dim, D, 1), key=grlex_key)
    out = []
    for i, a in enumerate(monos):
        for b in monos[i + 1:]:
            if sum(a) + sum(b) <= Dpairs:
                out.append((a, b))
    return out


def build_coboundary_system(theta, D: int, Dpairs: int,
                            cocycle: Optional[Callable[[MultiPoly, MultiPoly], object]] = None) -> LinearSystem:
    """Rows of V(a,b) = P({a,b}) - {P(a),b} - {a,P(b)} mod constants.

    ``cocycle`` defaults to the Vey cocycle; any callable returning a
    polynomial (or class) can be substituted, e.g. a coboundary for
    negative controls.
    """
    th = _theta(theta)
    d = len(th)
    if D < 3:
        raise BoundsError("D must be at least 3")
    if Dpairs > D + 2:
        raise BoundsError(f"Dpairs={Dpairs} needs P on degree {Dpairs - 2} > D={D}")
    if Dpairs < 2:
        raise BoundsError("Dpairs must be at least 2")
    if cocycle is None:
        cocycle = lambda a, b: vey_cocycle(th, a, b)
    monos = sorted(monomials_up_to(d, D, 1), key=grlex_key)
    unknowns = [(m, t) for m in monos for t in monos]

    @lru_cache(maxsize=None)
    def br(a: Exps, b: Exps) -> Dict[Exps, Fraction]:
        return raw_poisson_bracket(th, MultiPoly.monomial(a), MultiPoly.monomial(b)).terms

    rows: List[linsolve.Row] = []
    prov: List[tuple] = []
    for a, b in monomial_pairs(d, D, Dpairs):
        acc: Dict[Exps, Dict[Column, Fraction]] = {}

        def put(s: Exps, col: Column, v: Fraction):
            if sum(s) == 0 or not v:
                return
            row = acc.setdefault(s, {})
            w = row.get(col, Fraction(0)) + v
            if w:
                row[col] = w
            else:
                row.pop(col, None)

        for m, c in br(a, b).items():
            if sum(m) == 0:
                continue
            for s in monos:
                put(s, (m, s), c)
        for t in monos:
            for s, c in br(t, b).items():
                put(s, (a, t), -c)
            for s, c in br(a, t).items():
                put(s, (b, t), -c)
        rhs = _rep(cocycle(MultiPoly.monomial(a), MultiPoly.monomial(b))).drop_constant()
        targets = set(acc) | set(rhs.terms)
        for s in sorted(targets, key=grlex_key):
            coeffs = acc.get(s, {})
            r = rhs.terms.get(s, Fraction(0))
            if not coeffs and not r:
                continue
            rows.append((dict(coeffs), r))
            prov.append((a, b, s))
    return LinearSystem(th, D, Dpairs, unknowns, rows, prov)


@dataclass
class ObstructionCertificate:
    status: str  # "solvable" | "infeasible"
    system: LinearSystem
    table: Optional[LinearMapTable] = None
    combination: Optional[Dict[int, Fraction]] = None

    @property
    def infeasible(self) -> bool:
        return self.status == "infeasible"

    def verify(self, cocycle=None) -> bool:
        """Re-check by substitution: the witness combination reads 0 = nonzero,
        or the table satisfies every row and the coboundary equation on every pair."""
        sys = self.system
        if self.infeasible:
            return linsolve.verify_witness(sys.rows, self.combination)
        if not linsolve.verify_solution(sys.rows, self.table.unknowns()):
            return False
        return verify_table(sys, self.table, cocycle)

    def contradiction(self) -> Tuple[Dict[Column, Fraction], Fraction]:
        return linsolve.combine(self.system.rows, self.combination)

    def to_json(self) -> dict:
        sys = self.system
        out = {"status": self.status, "bounds": {"D": sys.D, "Dpairs": sys.Dpairs},
               "theta": [[format_rational(v) for v in row] for row in sys.theta]}
        if self.infeasible:
            idx = sorted(self.combination)
            out["witness"] = {
                "rows": [_row_to_json(sys.rows[i], sys.provenance[i]) for i in idx],
                "combination": [format_rational(self.combination[i]) for i in idx],
            }
        else:
            out["witness"] = {"table": self.table.to_json()}
        return out


def _prov_to_json(p: tuple) -> dict:
    if p and p[0] == "gauge":
        return {"gauge": p[1]}
    a, b, s = p
    return {"pair": [format_monomial(a), format_monomial(b)], "target_monomial": format_monomial(s)}


def _column_name(col: Column) -> str:
    m, t = col
    return f"P[{format_monomial(m)}][{format_monomial(t)}]"


def _parse_column(name: str, dim: int) -> Column:
    inner = name[2:-1]
    m_txt, t_txt = inner.split("][")
    return (next(iter(parse_poly(m_txt, dim).terms)), next(iter(parse_poly(t_txt, dim).terms)))


def _row_to_json(row: linsolve.Row, prov: tuple) -> dict:
    coeffs, rhs = row
    out = _prov_to_json(prov)
    out["coeffs"] = {_column_name(c): format_rational(v) for c, v in sorted(coeffs.items())}
    out["rhs"] = format_rational(rhs)
    return out


def verify_certificate_json(data: dict) -> bool:
    """Re-verify an infeasibility witness from its JSON form alone."""
    if data.get("status") != "infeasible":
        return False
    dim = len(data["theta"])
    rows = []
    for r in data["witness"]["rows"]:
        coeffs = {_parse_column(k, dim): parse_rational(v) for k, v in r["coeffs"].items()}
        rows.append((coeffs, parse_rational(r["rhs"])))
    weights = {i: parse_rational(w) for i, w in enumerate(data["witness"]["combination"])}
    return linsolve.verify_witness(rows, weights)


def verify_table(sys: LinearSystem, table: LinearMapTable, cocycle=None) -> bool:
    """The coboundary equation holds in A/K on every generating pair of the system."""
    th = sys.theta
    if cocycle is None:
        cocycle = lambda a, b: vey_cocycle(th, a, b)
    for a, b in monomial_pairs(sys.dim, sys.D, sys.Dpairs):
        A, B = MultiPoly.monomial(a), MultiPoly.monomial(b)
        lhs = PoissonFunctionClass(_rep(cocycle(A, B)))
        if lhs != coboundary(th, table, A, B):
            return False
    return True


def solve_or_certify(sys: LinearSystem) -> ObstructionCertificate:
    """Exact elimination; the result is re-verified before it is returned."""
    res = linsolve.solve(sys.rows)
    if res.solvable:
        table = LinearMapTable.from_unknowns(sys.dim, sys.D, res.solution)
        cert = ObstructionCertificate("solvable", sys, table=table)
        if not linsolve.verify_solution(sys.rows, table.unknowns()):
            raise AssertionError("solution failed re-verification")
        return cert
    cert = ObstructionCertificate("infeasible", sys, combination=res.witness)
    if not cert.verify():
        raise AssertionError("infeasibility witness failed re-verification")
    return cert


def embed_witness(cert: ObstructionCertificate, larger: LinearSystem) -> Optional[Dict[int, Fraction]]:
    """Transport an infeasibility witness into a system with larger bounds.

    Rows are matched by provenance; returns the transported combination if
    it still reads 0 = nonzero there, else None.
    """
    index = larger.row_index()
    weights = {}
    for i, w in cert.combination.items():
        j = index.get(cert.system.provenance[i])
        if j is None:
            return None
        weights[j] = w
    return weights if linsolve.verify_witness(larger.rows, weights) else None


# -- replay of the hand elimination ----------------------------------------------------


def _m(text: str) -> Exps:
    p = parse_poly(text.replace("x", "x1").replace("y", "x2"), 2)
    (e,) = p.terms
    return e


def _xy(e: Exps) -> str:
    """Monomial text in the x, y names of the two-dimensional proof."""
    parts = []
    for name, k in zip("xy", e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts) or "1"


def _xy_poly(p: MultiPoly) -> str:
    text = format_poly(p)
    return text.replace("x1", "x").replace("x2", "y")


@dataclass
class Constraint:
    """An affine relation on the unknowns, with a human-readable form."""

    name: str
    text: str
    coeffs: Dict[Column, Fraction]
    rhs: Fraction = Fraction(0)


@dataclass
class TranscriptStep:
    name: str
    description: str
    constraints: List[str]
    in_row_space: bool
    printed_form: Optional[str] = None
    printed_form_in_row_space: Optional[bool] = None

    def to_json(self) -> dict:
        out = {"step": self.name, "description": self.description, "constraints": self.constraints,
               "in_row_space": self.in_row_space}
        if self.printed_form is not None:
            out["printed_form"] = self.printed_form
            out["printed_form_in_row_space"] = self.printed_form_in_row_space
        return out


@dataclass
class Transcript:
    steps: List[TranscriptStep]
    x_coefficient_raz: Optional[Fraction]
    x_coefficient_dva: Optional[Fraction]
    contradiction: bool
    solver_status: str
    bounds: Tuple[int, int]

    @property
    def consistent(self) -> bool:
        return all(s.in_row_space for s in self.steps)

    def to_json(self) -> dict:
        fr = lambda q: None if q is None else format_rational(q)
        return {"bounds": {"D": self.bounds[0], "Dpairs": self.bounds[1]},
                "steps": [s.to_json() for s in self.steps],
                "x_coefficient_of_P(x^3*y^2)": {"raz": fr(self.x_coefficient_raz), "dva": fr(self.x_coefficient_dva)},
                "contradiction": self.contradiction, "solver_status": self.solver_status,
                "consistent_with_solver": self.consistent}


def _value_constraint(m: Exps, value: Dict[Exps, Fraction], c0: Fraction, monos: Sequence[Exps],
                      ) -> List[Tuple[Dict[Column, Fraction], Fraction]]:
    """Rows stating P(m) = sum_t value[t] t + c0 * u(x,x) * m (target by target)."""
    out = []
    cx = ((1, 0), (1, 0))
    for t in monos:
        coeffs = {(m, t): Fraction(1)}
        if t == m and c0:
            coeffs[cx] = coeffs.get(cx, Fraction(0)) - c0
        out.append(({k: v for k, v in coeffs.items() if v}, value.get(t, Fraction(0))))
    return out


class _RowSpace:
    """Row space of a consistent system, for membership tests."""

    def __init__(self, rows: Sequence[linsolve.Row]):
        self.ech = linsolve.RowEchelon(track=False)
        for coeffs, rhs in rows:
            self.ech.add(coeffs, rhs)
        if self.ech.contradiction is not None:
            raise AssertionError("membership base must be consistent")

    def contains_all(self, rows) -> bool:
        return all(self.ech.contains(c, r) for c, r in rows)

    def add(self, rows) -> None:
        for c, r in rows:
            self.ech.add(c, r)
        if self.ech.contradiction is not None:
            raise AssertionError("membership base became inconsistent")


def _inclusion_rows(sys: LinearSystem, expr: Dict[Column, Dict[Exps, Fraction]], const: Dict[Exps, Fraction]):
    """Rows saying sum_col u(col)*expr[col] + const is in K, one per nonconstant monomial."""
    targets = set(const)
    for v in expr.values():
        targets |= set(v)
    rows = []
    for s in sorted(targets, key=grlex_key):
        if sum(s) == 0:
            continue
        coeffs = {col: v[s] for col, v in expr.items() if v.get(s)}
        rows.append((coeffs, -const.get(s, Fraction(0))))
    return rows


def reproduce_paper_contradiction(theta=None, D: int = 5, Dpairs: int = 7) -> Transcript:
    """Replay the two-dimensional elimination step by step.

    Every derived constraint is checked to lie in the row space of a
    consistent subsystem of the generic coboundary system (pairs of total
    degree <= 6, where V vanishes mod constants, plus the pair in question
    and the gauge normalisations); a constraint outside that row space
    raises, since it would mean the replay and the solver disagree.
    """
    th = _theta(theta if theta is not None else canonical_theta(2))
    if th != canonical_theta(2):
        raise ValueError("the replay follows the canonical two-dimensional bracket")
    full = build_coboundary_system(th, D, Dpairs)
    solver_status = solve_or_certify(full).status
    monos = sorted(monomials_up_to(2, D, 1), key=grlex_key)
    x, y = _m("x"), _m("y")
    cx = (x, x)
    steps: List[TranscriptStep] = []
    base = full.restrict(lambda p: p[0] != "gauge" and sum(p[0]) + sum(p[1]) <= 6)
    space = _RowSpace(base.rows)

    def record(name, description, rows, constraints, printed=None, printed_rows=None, adopt=True, within=None):
        within = within or space
        ok = within.contains_all(rows)
        printed_ok = None if printed_rows is None else within.contains_all(printed_rows)
        steps.append(TranscriptStep(name, description, constraints, ok, printed, printed_ok))
        if not ok:
            raise AssertionError(f"replay step {name!r} is not implied by the generic system")
        if adopt:
            space.add(rows)

    def pair_rows(a: Exps, b: Exps):
        # stored pairs are grlex ordered; swapping a and b only negates the rows
        return [r for r, p in zip(full.rows, full.provenance) if {p[0], p[1]} == {a, b}]

    # Step 1: (x, y)
    expr = {(x, t): {} for t in monos}
    expr.update({(y, t): {} for t in monos})
    for t in monos:
        T = MultiPoly.monomial(t)
        for s, c in T.diff(0).terms.items():
            expr[(x, t)][s] = expr[(x, t)].get(s, Fraction(0)) + c
        for s, c in T.diff(1).terms.items():
            expr[(y, t)][s] = expr[(y, t)].get(s, Fraction(0)) + c
    record("a=x,b=y", "The coboundary equation on (x, y): the divergence of (P(x), P(y)) is constant",
           _inclusion_rows(full, expr, {}), ["d_x P(x) + d_y P(y) in K"])

    # Step 2: Hamiltonian normalisation P(x) = c0 x, P(y) = c0 y
    gauge_lin = []
    for m in (x, y):
        gauge_lin += _value_constraint(m, {}, Fraction(1), monos)
    space.add(gauge_lin)
    steps.append(TranscriptStep("normalize-linear",
                                "adjust P by a Hamiltonian vector field so that P(x) = c0 x, P(y) = c0 y "
                                "(c0 = P[x][x]); Hamiltonian fields are cocycles, so this is a gauge choice",
                                ["P(x) = c0*x", "P(y) = c0*y"], True))

    # Step 3: quadratic x linear: P(quadratic) is linear-valued
    quads = monomials_of_degree(2, 2)
    quads = sorted(quads, key=grlex_key, reverse=True)
    lin_rows = [({(q, t): Fraction(1)}, Fraction(0)) for q in quads for t in monos if sum(t) >= 2]
    record("quadratic x linear", "pairs (quadratic, linear) force P on quadratics to be linear-valued",
           lin_rows, [f"P({_xy(q)}) = c*x + c'*y" for q in quads])

    # Step 4: quadratic x quadratic: the P-quad shape
    x2, xy_, y2 = _m("x^2"), _m("x*y"), _m("y^2")
    u = lambda m, t: (m, t)
    shape = [
        ({u(x2, y): Fraction(1)}, Fraction(0)),                               # c12 = 0
        ({u(y2, x): Fraction(1)}, Fraction(0)),                               # c31 = 0
        ({u(x2, x): Fraction(1), u(xy_, y): Fraction(-2)}, Fraction(0)),      # c11 = 2 c22
        ({u(y2, y): Fraction(1), u(xy_, x): Fraction(-2)}, Fraction(0)),      # c32 = 2 c21
    ]
    record("quadratic x quadratic", "pairs of quadratics give the P-quad shape",
           shape, ["P(x^2) = 2*c_y*x", "P(x*y) = c_x*x + c_y*y", "P(y^2) = 2*c_x*y"])

    # Step 5: Hamiltonian shift by c_x x - c_y y kills the quadratics
    gauge_quad = []
    for q in quads:
        gauge_quad += _value_constraint(q, {}, Fraction(0), monos)
    space.add(gauge_quad)
    steps.append(TranscriptStep("normalize-quadratic",
                                "adjust P by the Hamiltonian field {c_x x - c_y y, .}: P vanishes on quadratics",
                                ["P(x^2) = 0", "P(x*y) = 0", "P(y^2) = 0"], True))

    # Step 6: cubic monomials: P(m) = -c0 m
    cubics = sorted(monomials_of_degree(2, 3), key=grlex_key, reverse=True)
    cubic_rows = []
    for m in cubics:
        cubic_rows += _value_constraint(m, {}, Fraction(-1), monos)
    record("cubic", "pairs with a cubic monomial give P on cubics",
           cubic_rows, [f"P({_xy(m)}) = -c0*{_xy(m)}" for m in cubics])

    # Step 7: quartic monomials, as brackets of cubics
    quartics = sorted(monomials_of_degree(2, 4), key=grlex_key, reverse=True)
    quartic_rows = []
    for m in quartics:
        quartic_rows += _value_constraint(m, {}, Fraction(-2), monos)
    record("quartic", "every quartic monomial is a bracket of cubics: P(x^n y^k) = -2 c0 x^n y^k, n+k = 4",
           quartic_rows, [f"P({_xy(m)}) = -2*c0*{_xy(m)}" for m in quartics])

    # Steps 8-9: the two constraints on P(x^3 y^2)
    target = _m("x^3*y^2")
    results = {}
    for name, a, b, printed in (
        ("raz", _m("x^4"), _m("y^3"), (Fraction(12), Fraction(-6), Fraction(3))),
        ("dva", _m("x^3*y"), _m("x*y^2"), (Fraction(5), Fraction(-3, 2), Fraction(3))),
    ):
        A, B = MultiPoly.monomial(a), MultiPoly.monomial(b)
        bracket = raw_poisson_bracket(th, A, B)
        (k,) = [c for e, c in bracket.terms.items() if e == target]
        V = raw_vey_cocycle(th, A, B).drop_constant()
        # V = k P(target) - {P(a), b} - {a, P(b)} with P(a) = -2 c0 a (or -c0 a for cubics)
        ca = Fraction(-(sum(a) - 2))
        cb = Fraction(-(sum(b) - 2))
        c0_coeff = -(ca + cb) * k   # {c a, b} + {a, c' b} = (c + c') {a, b}
        # constraint: k P(target) - V + c0_coeff * c0 * target in K
        expr = {(target, t): {t: k} for t in monos}
        expr[cx] = {target: c0_coeff}
        const = {e: -c for e, c in V.terms.items()}
        rows = _inclusion_rows(full, expr, const)
        pk, px, pc = printed
        p_expr = {(target, t): {t: pk} for t in monos}
        p_expr[cx] = {target: pc}
        printed_rows = _inclusion_rows(full, p_expr, {x: px})
        derived_text = (f"{format_rational(k)}*P(x^3*y^2) + ({_xy_poly(-V)})"
                        f" + {format_rational(c0_coeff)}*c0*x^3*y^2 in K")
        printed_text = f"{format_rational(pk)}*P(x^3*y^2) + ({format_rational(px)})*x + {format_rational(pc)}*c0*x^3*y^2 in K"
        # each pair is checked on its own: together the two pairs are inconsistent
        within = copy.deepcopy(space)
        within.add(pair_rows(a, b))
        record(f"{name}: a={_xy(a)},b={_xy(b)}", f"The coboundary equation on ({_xy(a)}, {_xy(b)}) with the normalised P",
               rows, [derived_text], printed_text, printed_rows, adopt=False, within=within)
        # x-coefficient of P(x^3 y^2): k * p_x - V[x] = 0
        results[name] = V.terms.get(x, Fraction(0)) / k

    joint = copy.deepcopy(space.ech)
    for a, b in ((_m("x^4"), _m("y^3")), (_m("x^3*y"), _m("x*y^2"))):
        for c, r in pair_rows(a, b):
            joint.add(c, r)
    contradiction = results["raz"] != results["dva"] and joint.contradiction is not None
    steps.append(TranscriptStep(
        "contradiction",
        "the x-coefficient of P(x^3*y^2) is forced to two different values",
        [f"raz: coefficient of x in P(x^3*y^2) = {format_rational(results['raz'])}",
         f"dva: coefficient of x in P(x^3*y^2) = {format_rational(results['dva'])}"],
        contradiction))
    return Transcript(steps, results["raz"], results["dva"], contradiction, solver_status, (D, Dpairs))


def explain_low_bounds(D: int, Dpairs: int, theta=None) -> ObstructionCertificate:
    """Solve the system at the given bounds (used to report 'no contradiction')."""
    th = _theta(theta if theta is not None else canonical_theta(2))
    return solve_or_certify(build_coboundary_system(th, D, Dpairs))
