"""Exact linear algebra over the rationals.

Only what the rotation extraction needs: solve A x = rhs by Gaussian
elimination with Fraction arithmetic, reporting either a unique solution, an
infeasibility certificate, or (for a one-dimensional solution space through a
particular solution) a normalized integer nullspace generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence


@dataclass
class LinearSolution:
    status: str  # "unique" | "underdetermined" | "infeasible"
    solution: Optional[list[Fraction]] = None       # a particular solution
    nullspace: Optional[list[list[Fraction]]] = None  # basis of ker(A)


def _normalize_integer(vec: list[Fraction]) -> list[Fraction]:
    """Scale to integer entries with gcd 1 and first nonzero entry positive."""
    denom_lcm = 1
    for v in vec:
        if v:
            denom_lcm = denom_lcm * v.denominator // gcd(denom_lcm, v.denominator)
    ints = [int(v * denom_lcm) for v in vec]
    g = 0
    for n in ints:
        g = gcd(g, abs(n))
    if g > 1:
        ints = [n // g for n in ints]
    for n in ints:
        if n != 0:
            if n < 0:
                ints = [-m for m in ints]
            break
    return [Fraction(n) for n in ints]


def gaussian_solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> LinearSolution:
    """Solve matrix @ x = rhs exactly.

    Returns status "unique" with the solution, "infeasible" (inconsistent
    system), or "underdetermined" with a particular solution (free variables
    set to 0) and a nullspace basis.  Each nullspace basis vector is scaled to
    integers with gcd 1 and first nonzero entry positive.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    rows = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [v / inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return LinearSolution(status="infeasible")
    particular = [Fraction(0)] * n
    for i, c in enumerate(pivot_cols):
        particular[c] = rows[i][n]
    free_cols = [c for c in range(n) if c not in pivot_cols]
    if not free_cols:
        return LinearSolution(status="unique", solution=particular)
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for i, c in enumerate(pivot_cols):
            vec[c] = -rows[i][fc]
        basis.append(_normalize_integer(vec))
    return LinearSolution(status="underdetermined", solution=particular, nullspace=basis)
