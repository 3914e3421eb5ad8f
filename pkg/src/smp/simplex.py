"""Exact two-phase simplex over the rationals.

Maximizes c·x subject to a mix of <= and == constraints and x >= 0.  Bland's
smallest-index pivoting rule is used throughout, which guarantees termination
without any tolerance machinery (everything is Fraction arithmetic).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence


@dataclass
class LinearProgram:
    """max objective·x  s.t.  A_le x <= b_le,  A_eq x == b_eq,  x >= 0."""

    objective: Sequence[Fraction]
    a_le: list[Sequence[Fraction]] = field(default_factory=list)
    b_le: list[Fraction] = field(default_factory=list)
    a_eq: list[Sequence[Fraction]] = field(default_factory=list)
    b_eq: list[Fraction] = field(default_factory=list)


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction] = None
    solution: Optional[list[Fraction]] = None


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    piv = tableau[row][col]
    tableau[row] = [v / piv for v in tableau[row]]
    for i, r in enumerate(tableau):
        if i != row and r[col] != 0:
            f = r[col]
            tableau[i] = [a - f * b for a, b in zip(r, tableau[row])]
    basis[row] = col


def _optimize(tableau: list[list[Fraction]], basis: list[int], ncols: int) -> str:
    """Run simplex on the tableau (last row = objective to maximize)."""
    obj = len(tableau) - 1
    while True:
        col = next((j for j in range(ncols) if tableau[obj][j] > 0), None)
        if col is None:
            return "optimal"
        best: Optional[tuple[Fraction, int, int]] = None
        for i in range(obj):
            if tableau[i][col] > 0:
                ratio = tableau[i][-1] / tableau[i][col]
                key = (ratio, basis[i], i)
                if best is None or key < best:
                    best = key
        if best is None:
            return "unbounded"
        _pivot(tableau, basis, best[2], col)


def simplex_maximize(lp: LinearProgram) -> LPResult:
    n = len(lp.objective)
    rows: list[list[Fraction]] = []
    kinds: list[str] = []
    for a, b in zip(lp.a_le, lp.b_le):
        rows.append([Fraction(v) for v in a] + [Fraction(b)])
        kinds.append("le")
    for a, b in zip(lp.a_eq, lp.b_eq):
        rows.append([Fraction(v) for v in a] + [Fraction(b)])
        kinds.append("eq")
    m = len(rows)
    # normalize to nonnegative right-hand sides
    for i in range(m):
        if rows[i][-1] < 0:
            rows[i] = [-v for v in rows[i]]
            if kinds[i] == "le":
                kinds[i] = "ge"
    nslack = sum(1 for k in kinds if k != "eq")
    nart = m  # one artificial per row keeps the bookkeeping simple
    ncols = n + nslack + nart
    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    sidx = n
    for i in range(m):
        row = rows[i][:-1] + [Fraction(0)] * (nslack + nart) + [rows[i][-1]]
        if kinds[i] == "le":
            row[sidx] = Fraction(1)
            sidx += 1
        elif kinds[i] == "ge":
            row[sidx] = Fraction(-1)
            sidx += 1
        row[n + nslack + i] = Fraction(1)
        basis.append(n + nslack + i)
        tableau.append(row)
    # phase 1: maximize -sum(artificials)
    phase1 = [Fraction(0)] * (ncols + 1)
    for i in range(m):
        phase1 = [a + b for a, b in zip(phase1, tableau[i])]
    phase1 = [v if j < n + nslack else Fraction(0) for j, v in enumerate(phase1[:-1])] + [phase1[-1]]
    tableau.append(phase1)
    _optimize(tableau, basis, n + nslack)
    if tableau[-1][-1] != 0:
        return LPResult(status="infeasible")
    tableau.pop()
    # drive any artificial still basic out of the basis (degenerate rows)
    for i in range(m):
        if basis[i] >= n + nslack:
            col = next((j for j in range(n + nslack) if tableau[i][j] != 0), None)
            if col is not None:
                _pivot(tableau, basis, i, col)
    # phase 2
    obj = [Fraction(c) for c in lp.objective] + [Fraction(0)] * (nslack + nart + 1)
    for i in range(m):
        if basis[i] < n and obj[basis[i]] != 0:
            f = obj[basis[i]]
            obj = [a - f * b for a, b in zip(obj, tableau[i])]
    tableau.append(obj)
    status = _optimize(tableau, basis, n + nslack)
    if status == "unbounded":
        return LPResult(status="unbounded")
    solution = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            solution[basis[i]] = tableau[i][-1]
    value = sum((c * v for c, v in zip(lp.objective, solution)), Fraction(0))
    return LPResult(status="optimal", value=value, solution=solution)
