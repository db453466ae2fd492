"""One in-house primal simplex used by every LP in the package.

Everything the solvers need (matrix games, the two Hamiltonians, the
cutting-plane master) is an instance of a single concave problem:

    maximize  sum_j  w_j * min_r (C_j q)_r    over q in the K-simplex,

for positive weights w_j and per-group constraint matrices C_j of shape
(R_j, K).  The LP reformulation introduces one shifted level variable per
group and one slack per constraint row; the shift makes the all-slack basis
feasible after pivoting q_0 into the simplex row, so no phase-1 is needed.

Pivot selection is Bland's rule (smallest-index entering variable, then
smallest-index basic variable among minimum-ratio ties), which cannot
cycle; the zero threshold is PIVOT_TOL.  Reported objective values are
recomputed from the primal point, not read off the tableau, so exact inputs
give exact values.  Duals of the coupling rows are returned as well: for a
single group they are the minimizing player's optimal mix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SolverFailure

PIVOT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MinmaxSolution:
    """Optimal point of the weighted min-max problem.

    Attributes
    ----------
    value : the recomputed objective sum_j w_j min_r (C_j q)_r.
    q : optimal point of the K-simplex.
    group_minima : min_r (C_j q)_r per group.
    row_duals : per group, nonnegative multipliers over that group's rows
        summing to w_j (a scaled optimal mix of the inner minimizer).
    iterations : simplex pivots performed.
    """

    value: float
    q: np.ndarray
    group_minima: np.ndarray
    row_duals: tuple[np.ndarray, ...]
    iterations: int


def max_weighted_min(
    weights: Sequence[float],
    groups: Sequence[np.ndarray],
    max_iter: int | None = None,
) -> MinmaxSolution:
    """Maximize sum_j w_j min_r (C_j q)_r over the simplex."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    mats = [np.atleast_2d(np.asarray(c, dtype=float)) for c in groups]
    if w.shape[0] != len(mats) or w.shape[0] == 0:
        raise ValueError("need one weight per group, at least one group")
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise ValueError("group weights must be positive and finite")
    K = mats[0].shape[1]
    for c in mats:
        if c.shape[1] != K or c.shape[0] < 1:
            raise ValueError("all groups must have K columns and >= 1 row")
        if not np.all(np.isfinite(c)):
            raise ValueError("group matrices must be finite")
    J = len(mats)
    rows_per = [c.shape[0] for c in mats]
    r_tot = sum(rows_per)
    shifts = np.array([np.max(np.abs(c)) + 1.0 for c in mats])

    # Standard form min c.x, A x = b, x >= 0 with variable order
    # [q_0..q_{K-1}, t_0..t_{J-1}, s_0..s_{r_tot-1}] where t_j is the
    # group level shifted up by shifts[j].
    m = 1 + r_tot
    n = K + J + r_tot
    a_mat = np.zeros((m, n))
    b = np.zeros(m)
    cost = np.zeros(n)
    a_mat[0, :K] = 1.0
    b[0] = 1.0
    cost[K:K + J] = -w
    row = 1
    for j, c in enumerate(mats):
        for r in range(c.shape[0]):
            a_mat[row, :K] = -c[r]
            a_mat[row, K + j] = 1.0
            a_mat[row, K + J + (row - 1)] = 1.0
            b[row] = shifts[j]
            row += 1

    basis, iters = _primal_simplex(a_mat, b, cost, max_iter)

    x = np.zeros(n)
    x[basis] = np.linalg.solve(a_mat[:, basis], b)
    q = np.clip(x[:K], 0.0, None)
    total = float(np.sum(q))
    if not np.isfinite(total) or abs(total - 1.0) > 1e-6:
        raise SolverFailure("simplex returned a defective primal point", iters)
    q = q / total

    minima = np.array([float(np.min(c @ q)) for c in mats])
    value = float(np.dot(w, minima))

    y = np.linalg.solve(a_mat[:, basis].T, cost[basis])
    duals: list[np.ndarray] = []
    row = 1
    for j, c in enumerate(mats):
        lam = np.clip(-y[row:row + c.shape[0]], 0.0, None)
        s = float(np.sum(lam))
        if s > 0.0:
            lam = lam * (w[j] / s)
        duals.append(lam)
        row += c.shape[0]
    return MinmaxSolution(value, q, minima, tuple(duals), iters)


def _primal_simplex(
    a_mat: np.ndarray,
    b: np.ndarray,
    cost: np.ndarray,
    max_iter: int | None,
) -> tuple[list[int], int]:
    """Bland-rule simplex; the starting basis is q_0 (simplex row) plus
    the slack columns, which is feasible by construction.

    Returns the optimal basis (column index per row) and the pivot count.
    """
    m, n = a_mat.shape
    tableau = np.hstack([a_mat.astype(float), b.reshape(-1, 1).astype(float)])
    # Start with q_0 basic in row 0 and the slacks elsewhere; eliminate
    # q_0 from the coupling rows to reach canonical form (b stays >= 0
    # because the group shifts dominate every |C| entry).
    col0 = 0
    for i in range(1, m):
        factor = tableau[i, col0]
        if factor != 0.0:
            tableau[i] -= factor * tableau[0]
    basis = [col0] + list(range(n - (m - 1), n))
    z = cost.astype(float).copy()
    obj = np.append(z, 0.0)
    for bi, col in enumerate(basis):
        if obj[col] != 0.0:
            obj -= obj[col] * tableau[bi]

    cap = max_iter if max_iter is not None else 200 * (m + n) + 5000
    for it in range(cap):
        negative = np.nonzero(obj[:n] < -PIVOT_TOL)[0]
        if negative.size == 0:
            return basis, it
        enter = int(negative[0])  # Bland: smallest index
        col = tableau[:, enter]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if rows.size == 0:
            raise SolverFailure("LP is unbounded", it)
        ratios = tableau[rows, -1] / col[rows]
        best = float(np.min(ratios))
        ties = rows[ratios <= best + PIVOT_TOL]
        leave_row = int(min(ties, key=lambda i: basis[i]))  # Bland again
        pivot_row = tableau[leave_row] / tableau[leave_row, enter]
        tableau[leave_row] = pivot_row
        factors = tableau[:, enter].copy()
        factors[leave_row] = 0.0
        tableau -= np.outer(factors, pivot_row)
        if obj[enter] != 0.0:
            obj -= obj[enter] * pivot_row
        basis[leave_row] = enter
    raise SolverFailure("simplex hit the iteration cap", cap)
