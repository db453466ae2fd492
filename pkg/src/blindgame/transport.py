"""Exact quadratic optimal transport between particle measures.

The solver is a transportation simplex on the bipartite structure of the
problem, with Bland's smallest-index anti-cycling rule.  All pivoting is
done in exact arithmetic: marginals are converted to integers over a common
denominator (weights are first snapped to rationals with denominator at most
10**12), flows stay integers throughout, and duals / reduced costs are exact
``Fraction``s of the float cost entries (floats are dyadic rationals, so no
precision is lost).  The returned plan is therefore an exact optimum of the
float cost matrix, and the deterministic pivot order makes it canonical.

Also provides the barycentric projection of a plan: the vector field on the
target measure that averages the displacements ``x - y`` arriving at each
target atom.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import InvalidStateError, SolverFailure
from .measures import ParticleMeasure

MARGINAL_TOL = 1e-9
_WEIGHT_DENOM = 10**12


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """A coupling of two particle measures with its squared-distance cost.

    Attributes
    ----------
    coupling : (m, k) array; entry (i, j) is the mass sent from source atom
        i to target atom j.
    source, target : the coupled measures.
    cost : total squared-displacement cost of the coupling.
    """

    coupling: np.ndarray
    source: ParticleMeasure
    target: ParticleMeasure
    cost: float

    def __post_init__(self):
        pi = np.asarray(self.coupling, dtype=float)
        m, k = self.source.n_atoms, self.target.n_atoms
        if pi.shape != (m, k):
            raise ValueError(f"coupling shape {pi.shape} != ({m}, {k})")
        if np.any(pi < -MARGINAL_TOL):
            raise ValueError("coupling has negative entries")
        row_err = np.max(np.abs(pi.sum(axis=1) - self.source.weights))
        col_err = np.max(np.abs(pi.sum(axis=0) - self.target.weights))
        if row_err > MARGINAL_TOL or col_err > MARGINAL_TOL:
            raise ValueError(
                f"marginal mismatch: rows {row_err:.3e}, cols {col_err:.3e}"
            )
        recomputed = float(np.sum(pi * _cost_matrix(self.source, self.target)))
        if abs(recomputed - self.cost) > MARGINAL_TOL:
            raise ValueError(
                f"stored cost {self.cost!r} != recomputed {recomputed!r}"
            )
        pi.setflags(write=False)
        object.__setattr__(self, "coupling", pi)


@dataclass(frozen=True, eq=False)
class ProjectionField:
    """A displacement vector per atom of ``base``."""

    base: ParticleMeasure
    vectors: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vectors, dtype=float)
        if vec.ndim == 1:
            vec = vec.reshape(-1, 1)
        if vec.shape != (self.base.n_atoms, self.base.dim):
            raise ValueError(
                f"vectors shape {vec.shape} != "
                f"({self.base.n_atoms}, {self.base.dim})"
            )
        vec.setflags(write=False)
        object.__setattr__(self, "vectors", vec)


def _cost_matrix(mu: ParticleMeasure, nu: ParticleMeasure) -> np.ndarray:
    diff = mu.points[:, None, :] - nu.points[None, :, :]
    return np.sum(diff * diff, axis=2)


def _integer_marginals(
    mu: ParticleMeasure, nu: ParticleMeasure
) -> tuple[list[int], list[int], int]:
    """Snap both weight vectors to integers over one exact denominator."""
    fa = [Fraction(float(w)).limit_denominator(_WEIGHT_DENOM) for w in mu.weights]
    fb = [Fraction(float(w)).limit_denominator(_WEIGHT_DENOM) for w in nu.weights]
    ta, tb = sum(fa), sum(fb)
    if ta == 0 or tb == 0:
        raise ValueError("measure has zero snapped mass")
    fa = [f / ta for f in fa]
    fb = [f / tb for f in fb]
    denom = lcm(*[f.denominator for f in fa + fb])
    a = [int(f * denom) for f in fa]
    b = [int(f * denom) for f in fb]
    assert sum(a) == denom and sum(b) == denom
    return a, b, denom


def _northwest_corner(
    a: list[int], b: list[int]
) -> dict[tuple[int, int], int]:
    """Initial basic feasible flow with exactly m + k - 1 basic cells."""
    m, k = len(a), len(b)
    rem_a, rem_b = list(a), list(b)
    flows: dict[tuple[int, int], int] = {}
    i = j = 0
    while True:
        f = min(rem_a[i], rem_b[j])
        flows[(i, j)] = f
        rem_a[i] -= f
        rem_b[j] -= f
        if i == m - 1 and j == k - 1:
            break
        if rem_a[i] == 0 and i < m - 1:
            i += 1
        else:
            j += 1
    assert len(flows) == m + k - 1
    return flows


def _tree_adjacency(
    basis: dict[tuple[int, int], int], m: int, k: int
) -> tuple[list[list[int]], list[list[int]]]:
    row_adj: list[list[int]] = [[] for _ in range(m)]
    col_adj: list[list[int]] = [[] for _ in range(k)]
    for (i, j) in basis:
        row_adj[i].append(j)
        col_adj[j].append(i)
    return row_adj, col_adj


def _duals(
    basis: dict[tuple[int, int], int],
    cost: list[list[Fraction]],
    m: int,
    k: int,
) -> tuple[list[Fraction], list[Fraction]]:
    """Solve u_i + v_j = c_ij on the basis tree, anchored at u_0 = 0."""
    row_adj, col_adj = _tree_adjacency(basis, m, k)
    u: list[Fraction | None] = [None] * m
    v: list[Fraction | None] = [None] * k
    u[0] = Fraction(0)
    stack: list[tuple[str, int]] = [("r", 0)]
    while stack:
        side, idx = stack.pop()
        if side == "r":
            for j in row_adj[idx]:
                if v[j] is None:
                    v[j] = cost[idx][j] - u[idx]
                    stack.append(("c", j))
        else:
            for i in col_adj[idx]:
                if u[i] is None:
                    u[i] = cost[i][idx] - v[idx]
                    stack.append(("r", i))
    if any(x is None for x in u) or any(x is None for x in v):
        raise InvalidStateError("transport basis is not a spanning tree")
    return u, v


def _find_cycle(
    basis: dict[tuple[int, int], int], enter: tuple[int, int], m: int, k: int
) -> list[tuple[int, int]]:
    """Cells of the unique cycle closed by ``enter``, starting with it.

    Cells at even positions gain flow, odd positions lose flow.
    """
    row_adj, col_adj = _tree_adjacency(basis, m, k)
    i0, j0 = enter
    # Path from column node j0 back to row node i0 through the tree.
    parent: dict[tuple[str, int], tuple[str, int]] = {}
    seen = {("c", j0)}
    stack = [("c", j0)]
    while stack:
        side, idx = stack.pop()
        if (side, idx) == ("r", i0):
            break
        nbrs = (
            [("r", i) for i in col_adj[idx]]
            if side == "c"
            else [("c", j) for j in row_adj[idx]]
        )
        for nb in nbrs:
            if nb not in seen:
                seen.add(nb)
                parent[nb] = (side, idx)
                stack.append(nb)
    node = ("r", i0)
    if node not in seen:
        raise InvalidStateError("entering cell closes no cycle")
    path_nodes = [node]
    while node != ("c", j0):
        node = parent[node]
        path_nodes.append(node)
    # path_nodes alternates r, c, r, ..., c; consecutive pairs are basis cells
    cycle = [enter]
    for a, b in zip(path_nodes[:-1], path_nodes[1:]):
        cell = (a[1], b[1]) if a[0] == "r" else (b[1], a[1])
        cycle.append(cell)
    return cycle


def _solve_transport(
    cost_f: np.ndarray, a: list[int], b: list[int], max_iter: int
) -> dict[tuple[int, int], int]:
    """Exact transportation simplex; returns optimal basic integer flows."""
    m, k = len(a), len(b)
    cost = [[Fraction(float(cost_f[i, j])) for j in range(k)] for i in range(m)]
    basis = _northwest_corner(a, b)
    for it in range(max_iter):
        u, v = _duals(basis, cost, m, k)
        enter = None
        for i in range(m):  # Bland: first cell with negative reduced cost
            for j in range(k):
                if (i, j) not in basis and cost[i][j] - u[i] - v[j] < 0:
                    enter = (i, j)
                    break
            if enter is not None:
                break
        if enter is None:
            return basis
        cycle = _find_cycle(basis, enter, m, k)
        minus = cycle[1::2]
        theta = min(basis[c] for c in minus)
        leave = min(
            (c for c in minus if basis[c] == theta),
            key=lambda c: c[0] * k + c[1],
        )
        for idx, c in enumerate(cycle):
            if idx == 0:
                continue
            basis[c] = basis[c] + theta if idx % 2 == 0 else basis[c] - theta
        del basis[leave]
        basis[enter] = theta
    raise SolverFailure("transport simplex hit iteration cap", max_iter)


def wasserstein2(
    mu: ParticleMeasure, nu: ParticleMeasure, max_iter: int = 200_000
) -> tuple[float, TransportPlan]:
    """Wasserstein-2 distance and an optimal plan between two measures.

    Returns ``(distance, plan)`` with ``distance = sqrt(plan.cost)``.  The
    plan is the canonical optimum selected by the deterministic pivot order.
    """
    if mu.dim != nu.dim:
        raise ValueError(f"dimension mismatch: {mu.dim} != {nu.dim}")
    cost_f = _cost_matrix(mu, nu)
    a, b, denom = _integer_marginals(mu, nu)
    basis = _solve_transport(cost_f, a, b, max_iter)
    coupling = np.zeros((mu.n_atoms, nu.n_atoms))
    total = 0.0
    for (i, j) in sorted(basis):
        mass = float(Fraction(basis[(i, j)], denom))
        coupling[i, j] = mass
        total += mass * float(cost_f[i, j])
    cost = max(total, 0.0)
    plan = TransportPlan(coupling, mu, nu, cost)
    return float(np.sqrt(cost)), plan


def reverse_plan(plan: TransportPlan) -> TransportPlan:
    """The same coupling read in the opposite direction."""
    return TransportPlan(
        plan.coupling.T.copy(), plan.target, plan.source, plan.cost
    )


def barycentric_projection(plan: TransportPlan) -> ProjectionField:
    """Average displacement field on the plan's target measure.

    For target atom y_j the vector is sum_i pi_ij (x_i - y_j) / sum_i pi_ij,
    the unique field satisfying the pairing identity
    <xi(y), x - y> integrated against the plan = <xi(y), p(y)> integrated
    against the target, for every test field xi.
    """
    pi = plan.coupling
    col_mass = pi.sum(axis=0)
    if np.any(col_mass <= 0.0):
        j = int(np.argmin(col_mass))
        raise InvalidStateError(f"target atom {j} receives no mass")
    disp = plan.source.points[:, None, :] - plan.target.points[None, :, :]
    vectors = np.einsum("ij,ijd->jd", pi, disp) / col_mass[:, None]
    return ProjectionField(plan.target, vectors)


def l2_norm(field: ProjectionField) -> float:
    """Weighted L2 norm of the field under its base measure."""
    sq = np.sum(field.vectors**2, axis=1)
    return float(np.sqrt(np.sum(field.base.weights * sq)))


def plan_to_csv(plan: TransportPlan) -> str:
    """Serialize the nonzero coupling entries as (i, j, mass) triples."""
    lines = ["i,j,mass"]
    for i in range(plan.coupling.shape[0]):
        for j in range(plan.coupling.shape[1]):
            mass = plan.coupling[i, j]
            if mass != 0.0:
                lines.append(f"{i},{j},{mass:.12g}")
    return "\n".join(lines) + "\n"
