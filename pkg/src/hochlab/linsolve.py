"""Sparse exact linear algebra over Q with infeasibility certificates.

Rows are ``(coeffs, rhs)`` with ``coeffs`` a dict ``column -> Fraction``.
Columns may be any hashable, orderable keys. Elimination keeps a reduced row
echelon basis and tracks, for every basis row, which combination of input
rows produced it, so an inconsistent system yields an explicit witness
``y`` with ``sum_i y_i row_i == (0 = 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

Row = Tuple[Dict[Hashable, Fraction], Fraction]


def _axpy(target: dict, source: dict, factor: Fraction) -> None:
    # target += factor * source, dropping zeros
    for k, v in source.items():
        w = target.get(k)
        if w is None:
            target[k] = factor * v
        else:
            w += factor * v
            if w:
                target[k] = w
            else:
                del target[k]


class RowEchelon:
    """Incrementally maintained reduced row echelon form.

    Each stored row has a pivot column with coefficient 1, and no other
    stored row has a nonzero entry in that column.
    """

    def __init__(self, track: bool = True):
        self.track = track
        self.pivots: Dict[Hashable, list] = {}  # col -> [coeffs, rhs, combo]
        self.contradiction: Optional[dict] = None

    def __len__(self):
        return len(self.pivots)

    def reduce(self, coeffs: dict, rhs: Fraction, combo: Optional[dict] = None):
        """Reduce a row against the basis; returns ``(coeffs, rhs, combo)``."""
        coeffs = dict(coeffs)
        combo = dict(combo) if combo is not None else {}
        hits = [c for c in coeffs if c in self.pivots]
        for col in hits:
            factor = coeffs.get(col)
            if not factor:
                continue
            prow, prhs, pcombo = self.pivots[col]
            _axpy(coeffs, prow, -factor)
            rhs -= factor * prhs
            if self.track:
                _axpy(combo, pcombo, -factor)
        return coeffs, rhs, combo

    def add(self, coeffs: dict, rhs, tag=None) -> bool:
        """Insert a row. Returns False if the row is dependent (or contradictory)."""
        rhs = Fraction(rhs)
        combo = {tag: Fraction(1)} if self.track else {}
        coeffs, rhs, combo = self.reduce(coeffs, rhs, combo)
        if not coeffs:
            if rhs and self.contradiction is None:
                scale = 1 / rhs
                self.contradiction = {k: v * scale for k, v in combo.items()}
            return False
        col = min(coeffs, key=_order_key)
        inv = 1 / coeffs[col]
        coeffs = {k: v * inv for k, v in coeffs.items()}
        rhs *= inv
        if self.track:
            combo = {k: v * inv for k, v in combo.items()}
        # back-substitute into existing rows to keep the form reduced
        for other in self.pivots.values():
            f = other[0].get(col)
            if f:
                _axpy(other[0], coeffs, -f)
                other[1] -= f * rhs
                if self.track:
                    _axpy(other[2], combo, -f)
        self.pivots[col] = [coeffs, rhs, combo]
        return True

    def contains(self, coeffs: dict, rhs=0) -> bool:
        """Is the affine row ``coeffs . x = rhs`` a combination of basis rows?"""
        red, r, _ = self.reduce(coeffs, Fraction(rhs))
        return not red and not r

    def solution(self, free_value=Fraction(0)) -> dict:
        """A particular solution with every free column set to zero."""
        if self.contradiction is not None:
            raise ValueError("system is inconsistent")
        out = {}
        for col, (coeffs, rhs, _) in self.pivots.items():
            out[col] = rhs
        return out


def _order_key(col):
    return _sortable(col)


def _sortable(obj):
    # make heterogeneous tuples comparable deterministically
    if isinstance(obj, tuple):
        return (0, tuple(_sortable(x) for x in obj))
    if isinstance(obj, (int, Fraction)):
        return (1, obj)
    return (2, str(obj))


@dataclass
class SolveResult:
    status: str  # "solvable" | "infeasible"
    solution: Optional[Dict[Hashable, Fraction]] = None
    witness: Optional[Dict[int, Fraction]] = None
    rank: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def solvable(self) -> bool:
        return self.status == "solvable"


def _components(rows: Sequence[Row]) -> List[List[int]]:
    parent: Dict[Hashable, Hashable] = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for coeffs, _ in rows:
        cols = list(coeffs)
        for c in cols:
            parent.setdefault(c, c)
        for c in cols[1:]:
            ra, rb = find(cols[0]), find(c)
            if ra != rb:
                parent[rb] = ra
    groups: Dict[Hashable, List[int]] = {}
    empty = []
    for i, (coeffs, _) in enumerate(rows):
        if not coeffs:
            empty.append(i)
            continue
        groups.setdefault(find(next(iter(coeffs))), []).append(i)
    out = [g for g in groups.values()]
    out.sort(key=lambda g: g[0])
    if empty:
        out.insert(0, empty)
    return out


def solve(rows: Sequence[Row]) -> SolveResult:
    """Solve a sparse system exactly, or certify that it has no solution.

    The system is split into connected components over shared columns; each
    is eliminated independently, which keeps certificates short.
    """
    solution: Dict[Hashable, Fraction] = {}
    rank = 0
    for group in _components(rows):
        ech = RowEchelon(track=True)
        for i in group:
            coeffs, rhs = rows[i]
            ech.add(coeffs, rhs, tag=i)
            if ech.contradiction is not None:
                witness = {k: v for k, v in ech.contradiction.items() if v}
                assert verify_witness(rows, witness)
                return SolveResult("infeasible", witness=dict(sorted(witness.items())))
        rank += len(ech)
        solution.update(ech.solution())
    assert verify_solution(rows, solution)
    return SolveResult("solvable", solution=solution, rank=rank)


def combine(rows: Sequence[Row], weights: Dict[int, Fraction]) -> Row:
    coeffs: dict = {}
    rhs = Fraction(0)
    for i, w in weights.items():
        c, r = rows[i]
        _axpy(coeffs, c, Fraction(w))
        rhs += Fraction(w) * r
    return coeffs, rhs


def verify_witness(rows: Sequence[Row], weights: Dict[int, Fraction]) -> bool:
    """True iff the weighted row sum reads ``0 = nonzero``."""
    coeffs, rhs = combine(rows, weights)
    return not coeffs and rhs != 0


def verify_solution(rows: Sequence[Row], x: Dict[Hashable, Fraction]) -> bool:
    for coeffs, rhs in rows:
        total = sum((v * x.get(k, 0) for k, v in coeffs.items()), Fraction(0))
        if total != rhs:
            return False
    return True
