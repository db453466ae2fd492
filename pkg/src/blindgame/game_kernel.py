"""Zero-sum matrix games and the control-grid Hamiltonians.

``solve_matrix_game`` certifies both players' optimal mixes for a finite
matrix game (row player minimizes).  ``eval_H`` and ``eval_Hn`` compute

    sup over mixes of v   of   integral over atoms y of
        inf over u   of   <f(y, u, v-mix), p(y)>

as one LP over the v-simplex, on the full v-grid and on a coarse subset
respectively.  ``gamma_n`` is the sampled modulus that bounds how much the
dynamics move when v is snapped to the coarse grid; it controls the gap
between the two Hamiltonians.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import ControlProblem, as_grid
from .errors import SolverFailure
from .measures import ParticleMeasure
from .simplex import max_weighted_min
from .transport import ProjectionField

DUALITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class MatrixGame:
    """Finite zero-sum game; the row player minimizes x' A y."""

    payoff: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.payoff, dtype=float))
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("payoff must be a nonempty matrix")
        if not np.all(np.isfinite(a)):
            raise ValueError("payoff entries must be finite")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "payoff", a)


@dataclass(frozen=True, eq=False)
class MatrixGameSolution:
    value: float
    row_mix: np.ndarray
    col_mix: np.ndarray
    iterations: int
    certified_gap: float


def solve_matrix_game(game: MatrixGame) -> MatrixGameSolution:
    """Value and certified optimal mixes of a zero-sum matrix game.

    One LP is solved in whichever orientation has fewer coupling rows; the
    other player's mix is recovered from the duals.  The returned mixes are
    checked to certify the value within DUALITY_TOL.
    """
    a = game.payoff
    m, k = a.shape
    if m <= k:
        sol = max_weighted_min([1.0], [a])
        col_mix = sol.q
        row_mix = sol.row_duals[0]
        value = sol.value
    else:
        sol = max_weighted_min([1.0], [-a.T])
        row_mix = sol.q
        col_mix = sol.row_duals[0]
        value = -sol.value
    row_mix = _clean_mix(row_mix)
    col_mix = _clean_mix(col_mix)
    worst_row = float(np.max(row_mix @ a))  # row player's guaranteed cap
    worst_col = float(np.min(a @ col_mix))  # column player's guaranteed floor
    gap = worst_row - worst_col
    if gap > DUALITY_TOL:
        raise SolverFailure(
            f"matrix-game certificate gap {gap:.3e} exceeds {DUALITY_TOL}",
            sol.iterations,
        )
    return MatrixGameSolution(value, row_mix, col_mix, sol.iterations, gap)


def _clean_mix(p: np.ndarray) -> np.ndarray:
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    total = float(np.sum(p))
    if total <= 0.0:
        raise SolverFailure("degenerate mix returned by LP", 0)
    return p / total


@dataclass(frozen=True, eq=False)
class HamiltonianQuery:
    """A base measure, a displacement field on it, and the game data."""

    base: ParticleMeasure
    field: ProjectionField
    problem: ControlProblem

    def __post_init__(self):
        if self.base.dim != self.problem.dim:
            raise ValueError("measure and problem dimensions differ")
        if not (
            np.array_equal(self.field.base.points, self.base.points)
            and np.array_equal(self.field.base.weights, self.base.weights)
        ):
            raise ValueError("field is not based on the query measure")


def _pairing_tables(q: HamiltonianQuery) -> tuple[np.ndarray, list[np.ndarray]]:
    """Per positive-weight atom, the (n_u, n_v) table <f(y,u,v), p(y)>."""
    prob = q.problem
    keep = q.base.weights > 0.0
    weights = q.base.weights[keep]
    tables = []
    for y, p in zip(q.base.points[keep], q.field.vectors[keep]):
        c = np.empty((prob.n_u, prob.n_v))
        for iu, u in enumerate(prob.u_grid):
            for iv, v in enumerate(prob.v_grid):
                c[iu, iv] = float(
                    np.dot(np.asarray(prob.f(y, u, v), dtype=float), p)
                )
        tables.append(c)
    return weights, tables


def eval_H(q: HamiltonianQuery) -> float:
    """Hamiltonian on the full v-grid.

    The inner infimum over u-mixes is attained at pure u by linearity, so
    the LP maximizes sum_j w_j z_j subject to z_j <= (C_j vmix)_u for every
    pure u, with vmix in the v-simplex.
    """
    weights, tables = _pairing_tables(q)
    if len(tables) == 0:
        return 0.0
    return max_weighted_min(weights, tables).value


def eval_Hn(q: HamiltonianQuery, coarse_v_indices: Sequence[int]) -> float:
    """Hamiltonian restricted to a coarse subset of the v-grid."""
    idx = [int(i) for i in coarse_v_indices]
    if len(idx) == 0:
        raise ValueError("coarse v-grid must be nonempty")
    if len(set(idx)) != len(idx):
        raise ValueError("coarse v-grid indices must be distinct")
    if any(i < 0 or i >= q.problem.n_v for i in idx):
        raise ValueError("coarse v-grid index out of range")
    weights, tables = _pairing_tables(q)
    if len(tables) == 0:
        return 0.0
    restricted = [c[:, idx] for c in tables]
    return max_weighted_min(weights, restricted).value


def nearest_coarse(fine_v: np.ndarray, coarse_v: np.ndarray) -> np.ndarray:
    """Index of the closest coarse point for each fine point (first wins)."""
    fine = as_grid(fine_v)
    coarse = as_grid(coarse_v)
    if fine.shape[1] != coarse.shape[1]:
        raise ValueError("fine and coarse grids have different point dims")
    dists = np.linalg.norm(fine[:, None, :] - coarse[None, :, :], axis=2)
    return np.argmin(dists, axis=1)


def gamma_n(
    problem: ControlProblem,
    fine_v,
    coarse_v,
    sample_points: Sequence,
) -> float:
    """Sampled sup of |f(x,u,v) - f(x,u,v')| with v' the nearest coarse v.

    An empirical stand-in for the coarsening modulus of the dynamics: the
    sup over all states is not computable, so it is taken over the supplied
    sample points (callers should include at least the atoms the
    Hamiltonians are evaluated on).
    """
    pts = [np.asarray(x, dtype=float).reshape(-1) for x in sample_points]
    if len(pts) == 0:
        raise ValueError("sample_points must be nonempty")
    fine = as_grid(fine_v)
    coarse = as_grid(coarse_v)
    pairing = nearest_coarse(fine, coarse)
    worst = 0.0
    for x in pts:
        for u in problem.u_grid:
            for i, v in enumerate(fine):
                v2 = coarse[pairing[i]]
                d = float(
                    np.linalg.norm(
                        np.asarray(problem.f(x, u, v), dtype=float)
                        - np.asarray(problem.f(x, u, v2), dtype=float)
                    )
                )
                if d > worst:
                    worst = d
    return worst
