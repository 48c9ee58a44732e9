"""Exact integer and rational linear algebra.

Everything downstream (freeness tests, cohomology ranks, square-class
arithmetic) reduces to gcd / rank / perfect-square questions over Z and Q,
so this module is deliberately float-free.  Rationals are
``fractions.Fraction`` (always reduced, positive denominator, canonical
zero 0/1 -- exactly the invariants we need), matrices are immutable
row-major tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError

Rational = Fraction


def gcd_all(values: Iterable[int]) -> int:
    """Nonnegative gcd of an arbitrary collection of integers.

    The gcd of an empty collection, and of an all-zero one, is 0 by
    convention; freeness tests of the form ``gcd == 1`` then fail naturally
    on degenerate weight data.
    """
    g = 0
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            return 1
    return g


def det2(a: int, b: int, c: int, d: int) -> int:
    """Determinant of [[a, b], [c, d]]."""
    return a * d - b * c


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise PreconditionError(
                f"IntMatrix {self.rows}x{self.cols} needs "
                f"{self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise PreconditionError("ragged rows")
            flat.extend(int(x) for x in r)
        return cls(nrows, ncols, tuple(flat))

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_lists(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise PreconditionError(
                f"RatMatrix {self.rows}x{self.cols} needs "
                f"{self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise PreconditionError("ragged rows")
            flat.extend(Fraction(x) for x in r)
        return cls(nrows, ncols, tuple(flat))

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]


def rank_int_rows(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination.

    Pivots are chosen with the smallest bit-length among the remaining
    submatrix to bound coefficient growth; every interior division is exact.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    rank = 0
    prev = 1
    while rank < nrows and rank < ncols:
        # smallest-bit-length nonzero pivot in the trailing submatrix
        best = None
        for i in range(rank, nrows):
            mi = m[i]
            for j in range(rank, ncols):
                v = mi[j]
                if v:
                    b = abs(v).bit_length()
                    if best is None or b < best[0]:
                        best = (b, i, j)
                        if b == 1:
                            break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != rank:
            m[rank], m[pi] = m[pi], m[rank]
        if pj != rank:
            for r in m:
                r[rank], r[pj] = r[pj], r[rank]
        pivot = m[rank][rank]
        for i in range(rank + 1, nrows):
            mi = m[i]
            f = mi[rank]
            if f:
                for j in range(rank + 1, ncols):
                    mi[j] = (pivot * mi[j] - f * m[rank][j]) // prev
                mi[rank] = 0
            elif prev != pivot:
                for j in range(rank + 1, ncols):
                    mi[j] = (pivot * mi[j]) // prev
        prev = pivot
        rank += 1
    return rank


def rank_rational(m: RatMatrix) -> int:
    """Rank over Q; rows are cleared to integers first (rank is unchanged)."""
    int_rows = []
    for i in range(m.rows):
        row = m.row(i)
        scale = math.lcm(*(f.denominator for f in row)) if row else 1
        int_rows.append([int(f * scale) for f in row])
    if not int_rows:
        return 0
    return rank_int_rows(int_rows)


def rank_integer(m: IntMatrix) -> int:
    return rank_int_rows(m.to_lists()) if m.rows else 0


def unimodular_complement(m: int, n: int) -> IntMatrix:
    """Complete a coprime pair (m, n) to a determinant-1 integer matrix.

    Returns [[m, n], [r, s]] with m*s - n*r = 1, found by the extended
    Euclidean algorithm.  The Bezout family (r + t*m, s + t*n) is searched
    for the representative with smallest |r|, then smallest |s|.
    """
    if (m, n) == (0, 0) or math.gcd(m, n) != 1:
        raise PreconditionError(f"({m}, {n}) is not a coprime pair")
    # extended Euclid: x*m + y*n == 1, so s0 = x, r0 = -y
    x, y = _bezout(m, n)
    r0, s0 = -y, x
    candidates = []
    if m != 0:
        t0 = round(Fraction(-r0, m))
        candidates = [(r0 + t * m, s0 + t * n) for t in range(t0 - 2, t0 + 3)]
    else:
        # r is pinned by -n*r == 1; s is free, smallest |s| is 0
        candidates = [(r0, 0)]
    best = min(candidates, key=lambda rs: (abs(rs[0]), abs(rs[1])))
    r, s = best
    assert m * s - n * r == 1
    return IntMatrix.from_rows([[m, n], [r, s]])


def _bezout(a: int, b: int) -> tuple[int, int]:
    """(x, y) with x*a + y*b == gcd-sign-adjusted 1 for coprime inputs."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    r0, r1 = a, b
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if r0 < 0:
        x0, y0 = -x0, -y0
    return x0, y0


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def is_rational_square(q) -> bool:
    """True iff q = c^2 for some rational c (0 counts).

    A reduced fraction is a rational square exactly when numerator and
    denominator are both perfect squares.
    """
    q = Fraction(q)
    return is_perfect_square(q.numerator) and is_perfect_square(q.denominator)
