"""Finitely supported probability measures on R^d.

A :class:`ParticleMeasure` is a weighted point cloud.  It is the state
object everything else in the package operates on: initial distributions,
transported distributions after a control stage, and the base measures the
Hamiltonians integrate over.

Weights must form a probability vector.  Float drift up to 1e-12 away from
total mass 1 is silently renormalized; anything larger is rejected as a bug
in the caller.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ParticleMeasure:
    """Probability measure with finite support: sum_i w_i * delta(x_i).

    Attributes
    ----------
    points : (m, d) float array, one support point per row.
    weights : (m,) float array, nonnegative, summing to 1.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("points must be a nonempty (m, d) array")
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != pts.shape[0]:
            raise ValueError(
                f"got {pts.shape[0]} points but {w.shape[0]} weights"
            )
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(w)):
            raise ValueError("points and weights must be finite")
        total = float(np.sum(w))
        drift = abs(total - 1.0)
        if drift > WEIGHT_TOL:
            raise ValueError(
                f"weights sum to {total!r}, off by {drift:.3e} > {WEIGHT_TOL}"
            )
        if drift > 0.0:
            w = w / total
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.points.shape[0]

    def __repr__(self) -> str:
        return f"ParticleMeasure(n_atoms={self.n_atoms}, dim={self.dim})"


def pushforward(
    mu: ParticleMeasure, map: Callable[[np.ndarray], np.ndarray]
) -> ParticleMeasure:
    """Image measure of ``mu`` under a point map; weights are untouched.

    The map may change the ambient dimension but every image point must
    share one dimension.
    """
    images = []
    out_dim = None
    for x in mu.points:
        y = np.atleast_1d(np.asarray(map(x), dtype=float)).reshape(-1)
        if out_dim is None:
            out_dim = y.shape[0]
        elif y.shape[0] != out_dim:
            raise ValueError(
                f"map output dimension {y.shape[0]} != {out_dim}"
            )
        images.append(y)
    return ParticleMeasure(np.array(images), mu.weights.copy())


def split(
    mu: ParticleMeasure,
    fanout: Sequence[Sequence[tuple[float, np.ndarray]]],
) -> ParticleMeasure:
    """Distribute each atom's mass over branches.

    ``fanout[i]`` lists ``(branch_weight, branch_point)`` pairs for atom i;
    the branch weights of each atom must form a probability vector.  Used to
    realize randomized per-particle controls as mass splitting.
    """
    if len(fanout) != mu.n_atoms:
        raise ValueError(
            f"fanout has {len(fanout)} entries for {mu.n_atoms} atoms"
        )
    new_points = []
    new_weights = []
    for i, branches in enumerate(fanout):
        if len(branches) == 0:
            raise ValueError(f"atom {i}: empty branch list")
        bw = np.array([float(b[0]) for b in branches])
        if np.any(bw < 0.0) or abs(float(np.sum(bw)) - 1.0) > WEIGHT_TOL:
            raise ValueError(
                f"atom {i}: branch weights are not a probability vector"
            )
        for w_b, x_b in branches:
            new_points.append(
                np.atleast_1d(np.asarray(x_b, dtype=float)).reshape(-1)
            )
            new_weights.append(mu.weights[i] * float(w_b))
    return ParticleMeasure(np.array(new_points), np.array(new_weights))


def prune(mu: ParticleMeasure, tol: float) -> ParticleMeasure:
    """Merge atoms closer than ``tol`` at their weighted barycenter.

    Greedy: repeatedly merges the globally closest pair (distance <= tol),
    breaking ties by lowest atom index, until all pairwise distances exceed
    tol.  Total mass is conserved and the result is a fixed point of prune
    at the same tol.
    """
    if tol < 0.0:
        raise ValueError("tol must be >= 0")
    pts = [p.copy() for p in mu.points]
    wts = list(mu.weights)
    while len(pts) > 1:
        best = None  # (dist, i, j)
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = float(np.linalg.norm(pts[i] - pts[j]))
                if d <= tol and (best is None or d < best[0]):
                    best = (d, i, j)
        if best is None:
            break
        _, i, j = best
        w = wts[i] + wts[j]
        if w > 0.0:
            bary = (wts[i] * pts[i] + wts[j] * pts[j]) / w
        else:
            bary = 0.5 * (pts[i] + pts[j])
        pts[i] = bary
        wts[i] = w
        del pts[j]
        del wts[j]
    return ParticleMeasure(np.array(pts), np.array(wts))


def second_moment(mu: ParticleMeasure) -> float:
    """sum_i w_i |x_i|^2."""
    return float(np.sum(mu.weights * np.sum(mu.points**2, axis=1)))


def to_csv(mu: ParticleMeasure) -> str:
    """Serialize: header then one ``w,x_1,...,x_d`` row per atom."""
    cols = ["w"] + [f"x_{k + 1}" for k in range(mu.dim)]
    lines = [",".join(cols)]
    for w, x in zip(mu.weights, mu.points):
        lines.append(",".join(_fmt(v) for v in [w, *x]))
    return "\n".join(lines) + "\n"


def from_csv(text_or_path) -> ParticleMeasure:
    """Parse the CSV produced by :func:`to_csv` (header required)."""
    if hasattr(text_or_path, "read"):
        text = text_or_path.read()
    elif isinstance(text_or_path, os.PathLike) or (
        isinstance(text_or_path, str)
        and "\n" not in text_or_path
        and os.path.exists(text_or_path)
    ):
        with open(text_or_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = str(text_or_path)
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty particle-measure CSV")
    header = [c.strip() for c in lines[0].split(",")]
    if header[0] != "w":
        raise ValueError("particle-measure CSV must start with a 'w' header")
    d = len(header) - 1
    weights, points = [], []
    for ln in lines[1:]:
        vals = [float(c) for c in ln.split(",")]
        if len(vals) != d + 1:
            raise ValueError(f"row has {len(vals)} columns, expected {d + 1}")
        weights.append(vals[0])
        points.append(vals[1:])
    return ParticleMeasure(np.array(points), np.array(weights))


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"
