"""Small exact linear algebra over the rationals.

Rank, span tracking, inversion and linear solving with Fraction entries.
These back the grading and chart certificates, which must not depend on
floating point (the flag dimensions d_n define the whole pipeline).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vector = Sequence[Fraction]


def _frac_row(row: Sequence) -> list[Fraction]:
    return [v if isinstance(v, Fraction) else Fraction(v) for v in row]


class SpanBasis:
    """Incremental row-echelon basis over Q.

    add() reduces the vector against the current basis and keeps it if a
    nonzero remainder survives; contains() tests membership in the span.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: Sequence) -> list[Fraction]:
        v = _frac_row(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                factor = v[p]
                for j in range(p, self.dim):
                    v[j] -= factor * row[j]
        return v

    def add(self, vec: Sequence) -> bool:
        """Add a vector; returns True if it enlarged the span."""
        v = self._reduce(vec)
        for p in range(self.dim):
            if v[p] != 0:
                inv = Fraction(1) / v[p]
                v = [x * inv for x in v]
                self.rows.append(v)
                self.pivots.append(p)
                order = sorted(range(len(self.rows)), key=lambda i: self.pivots[i])
                self.rows = [self.rows[i] for i in order]
                self.pivots = [self.pivots[i] for i in order]
                return True
        return False

    def contains(self, vec: Sequence) -> bool:
        return all(x == 0 for x in self._reduce(vec))


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    basis = SpanBasis(len(rows[0]))
    for r in rows:
        basis.add(r)
    return basis.rank


def invert(matrix: Sequence[Sequence]) -> list[list[Fraction]]:
    """Exact inverse of a square rational matrix; raises on singularity."""
    n = len(matrix)
    aug = [_frac_row(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular over Q")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def solve(
    rows: Sequence[Sequence], rhs: Sequence
) -> list[Fraction] | None:
    """Solve A c = b exactly.

    Returns a particular solution with all free variables set to zero, or
    None if the system is inconsistent.  A may be rectangular.
    """
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    aug = [_frac_row(row) + [Fraction(rhs[i]) if not isinstance(rhs[i], Fraction) else rhs[i]] for i, row in enumerate(rows)]
    pivots: list[tuple[int, int]] = []  # (row, col)
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, m) if aug[i][col] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = Fraction(1) / aug[r][col]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][col] != 0:
                factor = aug[i][col]
                aug[i] = [a - factor * b for a, b in zip(aug[i], aug[r])]
        pivots.append((r, col))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    solution = [Fraction(0)] * n
    for row_i, col_i in pivots:
        solution[col_i] = aug[row_i][n]
    return solution
