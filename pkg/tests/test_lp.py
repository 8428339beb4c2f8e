"""Edge cases of the exact simplex; heavier coverage lives in test_inversion."""

from fractions import Fraction as F

from fkseries.lp import solve_lp


def test_simple_optimum_and_duality():
    r = solve_lp([F(1), F(1)], [], [], [[F(1), F(1)]], [F(3)])
    assert r.status == 'optimal' and r.value == 3
    assert r.y_ge[0] * 3 == r.value


def test_upper_bound_via_negated_row():
    r = solve_lp([F(-1)], [], [], [[F(-1)]], [F(-5)])
    assert r.status == 'optimal' and r.value == -5 and r.x == [F(5)]


def test_unbounded_returns_ray():
    r = solve_lp([F(-1)], [], [], [], [])
    assert r.status == 'unbounded' and r.ray == [F(1)]


def test_infeasible():
    r = solve_lp([F(1)], [[F(1)]], [F(-1)], [], [])
    assert r.status == 'infeasible'


def test_mixed_constraints_reconstruction():
    # min 2x+3y st x+y = 4, x-y >= 1: optimum 8 at (4,0)
    r = solve_lp([F(2), F(3)], [[F(1), F(1)]], [F(4)], [[F(1), F(-1)]], [F(1)])
    assert r.value == 8 and r.x == [F(4), F(0)]
    # c = A^T y + reduced, checked on the feasible point (3,1)
    lhs = 2 * 3 + 3 * 1
    rhs = r.y_eq[0] * 4 + r.y_ge[0] * (3 - 1) + r.reduced[0] * 3 + r.reduced[1] * 1
    assert lhs == rhs


def test_redundant_rows_keep_duals_consistent():
    # second equality repeats the first; duals must still reproduce costs
    r = solve_lp([F(1), F(2)],
                 [[F(1), F(1)], [F(2), F(2)]], [F(2), F(4)],
                 [], [])
    assert r.status == 'optimal' and r.value == 2
    for j, c in enumerate([F(1), F(2)]):
        tot = r.reduced[j] + r.y_eq[0] * [F(1), F(1)][j] + r.y_eq[1] * [F(2), F(2)][j]
        assert tot == c
