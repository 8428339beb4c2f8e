"""Exact linear programming over the rationals.

A small dense two-phase simplex with Bland's rule.  Everything is a
Fraction, so optima and dual multipliers are exact and can be used as
checkable certificates.  Problem sizes here are tiny (tens of variables),
so no effort is spent on sparsity or revised-simplex bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Row = Sequence[Fraction]


@dataclass
class LPResult:
    """Outcome of ``solve_lp``.

    status is one of 'optimal', 'unbounded', 'infeasible'.  For 'optimal',
    ``x`` is a minimiser, ``value`` the optimum (including the constant
    term), ``y_eq``/``y_ge`` the duals of the equality and >= rows, and
    ``reduced`` the reduced costs of the structural variables.  For
    'unbounded', ``ray`` is a recession direction with negative cost.
    """

    status: str
    value: Optional[Fraction] = None
    x: Optional[list[Fraction]] = None
    y_eq: Optional[list[Fraction]] = None
    y_ge: Optional[list[Fraction]] = None
    reduced: Optional[list[Fraction]] = None
    ray: Optional[list[Fraction]] = None


def _pivot(tab: list[list[Fraction]], costs: list[Fraction], basis: list[int],
           row: int, col: int) -> None:
    piv = tab[row][col]
    inv = Fraction(1) / piv
    tab[row] = [v * inv for v in tab[row]]
    for r in range(len(tab)):
        if r != row and tab[r][col]:
            f = tab[r][col]
            tab[r] = [a - f * b for a, b in zip(tab[r], tab[row])]
    if costs[col]:
        f = costs[col]
        for j in range(len(costs)):
            costs[j] -= f * tab[row][j]
    basis[row] = col


def _run_simplex(tab: list[list[Fraction]], costs: list[Fraction],
                 basis: list[int], allowed: list[bool]) -> Optional[int]:
    """Minimise until optimal.  Returns None, or the entering column index
    if the problem is unbounded in that direction.  ``costs`` holds the
    current reduced-cost row (rhs in the last slot tracks -objective).
    Bland's rule throughout, so no cycling."""
    ncols = len(costs) - 1
    while True:
        enter = -1
        for j in range(ncols):
            if allowed[j] and costs[j] < 0:
                enter = j
                break
        if enter < 0:
            return None
        leave = -1
        best: Optional[Fraction] = None
        for r in range(len(tab)):
            a = tab[r][enter]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave < 0:
            return enter
        _pivot(tab, costs, basis, leave, enter)


def solve_lp(c: Row, a_eq: Sequence[Row], b_eq: Row,
             a_ge: Sequence[Row], b_ge: Row,
             constant: Fraction = Fraction(0)) -> LPResult:
    """Minimise c.x + constant subject to a_eq x = b_eq, a_ge x >= b_ge, x >= 0."""
    n = len(c)
    c = [Fraction(v) for v in c]
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    n_ge = len(a_ge)
    for row, b in zip(a_eq, b_eq):
        rows.append([Fraction(v) for v in row] + [Fraction(0)] * n_ge)
        rhs.append(Fraction(b))
    for k, (row, b) in enumerate(zip(a_ge, b_ge)):
        slack = [Fraction(0)] * n_ge
        slack[k] = Fraction(-1)
        rows.append([Fraction(v) for v in row] + slack)
        rhs.append(Fraction(b))
    m = len(rows)
    flipped = [False] * m
    for r in range(m):
        if rhs[r] < 0:
            rows[r] = [-v for v in rows[r]]
            rhs[r] = -rhs[r]
            flipped[r] = True

    width = n + n_ge
    total = width + m  # + artificials
    tab = [rows[r] + [Fraction(1) if k == r else Fraction(0) for k in range(m)] + [rhs[r]]
           for r in range(m)]
    basis = [width + r for r in range(m)]
    allowed = [True] * width + [False] * m

    # Phase 1: minimise the sum of artificials.
    costs1 = [Fraction(0)] * (total + 1)
    for r in range(m):
        for j in range(total + 1):
            costs1[j] -= tab[r][j]
    unb = _run_simplex(tab, costs1, basis, allowed)
    assert unb is None
    if -costs1[-1] != 0:
        return LPResult(status='infeasible')
    # Drive leftover artificials out of the basis.
    drop: list[int] = []
    for r in range(m):
        if basis[r] >= width:
            col = next((j for j in range(width) if tab[r][j] != 0), None)
            if col is None:
                drop.append(r)
            else:
                _pivot(tab, costs1, basis, r, col)
    if drop:
        tab = [tab[r] for r in range(m) if r not in drop]
        basis = [basis[r] for r in range(m) if r not in drop]
        keep_arts = [r for r in range(m) if r not in drop]
    else:
        keep_arts = list(range(m))

    # Phase 2.
    costs2 = [Fraction(0)] * (total + 1)
    for j in range(n):
        costs2[j] = c[j]
    for r, b in enumerate(basis):
        if costs2[b]:
            f = costs2[b]
            for j in range(total + 1):
                costs2[j] -= f * tab[r][j]
    unb = _run_simplex(tab, costs2, basis, allowed)
    if unb is not None:
        ray = [Fraction(0)] * width
        ray[unb] = Fraction(1)
        for r, b in enumerate(basis):
            if b < width:
                ray[b] = -tab[r][unb]
        return LPResult(status='unbounded', ray=ray[:n])

    x = [Fraction(0)] * width
    for r, b in enumerate(basis):
        if b < width:
            x[b] = tab[r][-1]
    # Duals: c_B B^{-1} read off the artificial columns, undoing row flips.
    y_rows = [Fraction(0)] * m
    for orig in keep_arts:
        y_rows[orig] = -costs2[width + orig]
    for r in range(m):
        if flipped[r]:
            y_rows[r] = -y_rows[r]
    value = constant - costs2[-1]
    return LPResult(status='optimal', value=value, x=x[:n],
                    y_eq=y_rows[:len(a_eq)], y_ge=y_rows[len(a_eq):],
                    reduced=[costs2[j] for j in range(n)])
