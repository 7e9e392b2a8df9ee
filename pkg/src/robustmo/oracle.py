"""Brute-force certifiers, independent of the solver code paths.

These scan dense grids and use only cone membership primitives plus raw
loops, so they can vouch for solver output without sharing logic with the
maximal-element or direction modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .problems import UncertainProblem

GRID_POINT_CAP = 10_000_000
MAX_ORACLE_DIM = 3
_CHUNK = 8192


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned scan grid: box bounds plus a step or per-axis count."""

    lb: np.ndarray
    ub: np.ndarray
    step: float | None = None
    points_per_axis: int | None = None

    def __post_init__(self):
        lb = np.atleast_1d(np.asarray(self.lb, dtype=float))
        ub = np.atleast_1d(np.asarray(self.ub, dtype=float))
        if lb.shape != ub.shape or np.any(ub < lb):
            raise ValueError("invalid grid bounds")
        if (self.step is None) == (self.points_per_axis is None):
            raise ValueError("give exactly one of step or points_per_axis")
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)

    def axes(self) -> list[np.ndarray]:
        out = []
        for d in range(self.lb.shape[0]):
            if self.points_per_axis is not None:
                num = self.points_per_axis
            else:
                num = int(math.floor((self.ub[d] - self.lb[d]) / self.step + 1e-9)) + 1
            out.append(np.linspace(self.lb[d], self.ub[d], max(num, 1)))
        return out

    @property
    def total_points(self) -> int:
        return math.prod(len(a) for a in self.axes())


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of a grid scan for dominating points."""

    certified_on_grid: bool
    counterexample: tuple[float, ...] | None
    grid_points: int
    invalid_points: int
    reference_point: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "certified_on_grid": self.certified_on_grid,
            "counterexample": None if self.counterexample is None
            else list(self.counterexample),
            "grid_points": self.grid_points,
            "invalid_points": self.invalid_points,
            "reference_point": list(self.reference_point),
        }


def _grid_points(spec: GridSpec):
    axes = spec.axes()
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def certify_robust_weak_efficiency(problem: UncertainProblem, x_bar,
                                   grid: GridSpec) -> CertificationReport:
    """Scan a grid for a point whose whole image strictly dominates.

    A grid point ``x`` is a counterexample when every one of its image
    points lies strictly below some image point of ``x_bar`` through the
    cone interior.  Absence of counterexamples certifies weak robust
    efficiency on this grid only, never globally.
    """
    if problem.n > MAX_ORACLE_DIM:
        raise CapacityError(
            f"grid certification supports up to {MAX_ORACLE_DIM} decision "
            f"dimensions, problem has {problem.n}"
        )
    total = grid.total_points
    if total > GRID_POINT_CAP:
        raise CapacityError(f"grid has {total} points, cap is {GRID_POINT_CAP}")

    x_bar = np.ravel(np.asarray(x_bar, dtype=float))
    ref = problem.evaluate_image(x_bar)            # (pbar, m)
    rows = problem.cone.rows
    eps = problem.cone.strict_tol
    ref_proj = ref @ rows.T                        # (pbar, q)

    X = _grid_points(grid)
    invalid = 0
    use_batch = problem.supports_batch()
    for start in range(0, X.shape[0], _CHUNK):
        chunk = X[start:start + _CHUNK]
        mask = np.ones(chunk.shape[0], dtype=bool)  # still-candidate points
        bad = np.zeros(chunk.shape[0], dtype=bool)
        for i in range(problem.p):
            if use_batch:
                vals = problem.evaluate_batch(chunk, i)
            else:
                vals = np.empty((chunk.shape[0], problem.m))
                for b in range(chunk.shape[0]):
                    with np.errstate(all="ignore"):
                        vals[b] = problem.objective(chunk[b], problem.scenarios[i])
            finite = np.all(np.isfinite(vals), axis=-1)
            bad |= ~finite
            vals = np.where(finite[:, None], vals, 0.0)
            # dominated[b] = exists z in ref with z - vals[b] in int K
            diff = ref_proj[None, :, :] - (vals @ rows.T)[:, None, :]
            dominated = np.any(np.all(diff > eps, axis=-1), axis=-1)
            mask &= dominated & finite
            if not mask.any():
                break
        invalid += int(bad.sum())
        if mask.any():
            b = int(np.flatnonzero(mask)[0])
            return CertificationReport(
                certified_on_grid=False,
                counterexample=tuple(chunk[b].tolist()),
                grid_points=total, invalid_points=invalid,
                reference_point=tuple(x_bar.tolist()),
            )
    return CertificationReport(
        certified_on_grid=True, counterexample=None,
        grid_points=total, invalid_points=invalid,
        reference_point=tuple(x_bar.tolist()),
    )


def _piece_max(inst, P: np.ndarray) -> np.ndarray:
    """max_k f_k over a batch of directions, by direct evaluation."""
    lin = P @ inst.c.T                                       # (N, K)
    quad = 0.5 * np.einsum("bi,kij,bj->bk", P, inst.Q, P)
    return np.max(lin + quad, axis=1)


def minmax_grid_value(inst, radius: float, resolution: int = 41,
                      refine: int = 3) -> float:
    """Dense-grid minimum of the piecewise quadratic max over a ball.

    Scans a cube grid masked to the ball, then zooms the grid around the
    best cell ``refine`` times; every evaluated point stays inside the
    original ball, so the result upper-bounds the true minimum and
    tightens with each refinement.
    """
    n = inst.n
    if n > MAX_ORACLE_DIM:
        raise CapacityError(f"grid oracle supports up to {MAX_ORACLE_DIM} dimensions")
    if resolution**n > GRID_POINT_CAP:
        raise CapacityError(f"grid has {resolution ** n} points, cap is {GRID_POINT_CAP}")

    center = np.zeros(n)
    local = float(radius)
    best_val = math.inf
    best_pt = center
    for _ in range(refine + 1):
        axes = [np.linspace(center[d] - local, center[d] + local, resolution)
                for d in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        P = np.stack([m.ravel() for m in mesh], axis=-1)
        P = P[np.linalg.norm(P, axis=1) <= radius + 1e-12]
        if P.shape[0] == 0:
            break
        vals = _piece_max(inst, P)
        b = int(np.argmin(vals))
        if vals[b] < best_val:
            best_val = float(vals[b])
            best_pt = P[b]
        center = best_pt
        local = 2.0 * (2.0 * local / (resolution - 1))
    return best_val
