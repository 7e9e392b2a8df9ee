"""Per-scenario, per-component BFGS curvature models.

One symmetric positive definite ``n x n`` block is kept for every
(scenario, objective-component) pair, so that ``p' B p`` meaningfully maps a
direction to an objective-space vector.  Blocks are refreshed with the
classical rank-two BFGS update; updates that fail the curvature safeguard
are skipped, never damped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError
from .problems import UncertainProblem, finite_difference_hessian

CURVATURE_TOL = 1e-8
PD_FLOOR = 1e-6


@dataclass
class HessianStore:
    """Stack of curvature blocks, shape (p, m, n, n).

    ``blocks[i, l]`` approximates the Hessian of objective component ``l``
    under scenario ``i``; every block stays symmetric positive definite.
    """

    blocks: np.ndarray
    curvature_tol: float = CURVATURE_TOL

    @property
    def p(self) -> int:
        return self.blocks.shape[0]

    @property
    def m(self) -> int:
        return self.blocks.shape[1]

    @property
    def n(self) -> int:
        return self.blocks.shape[2]

    def block(self, i: int, l: int) -> np.ndarray:
        return self.blocks[i, l]

    def assert_symmetric(self, tol: float = 1e-12) -> None:
        drift = np.max(np.abs(self.blocks - np.swapaxes(self.blocks, -1, -2)))
        if drift > tol:
            raise AssertionError(f"symmetry drift {drift} exceeds {tol}")

    def assert_positive_definite(self) -> None:
        for i in range(self.p):
            for l in range(self.m):
                np.linalg.cholesky(self.blocks[i, l])

    def k_positive_definite_sample(self, cone, directions: int = 64,
                                   seed: int = 0) -> bool:
        """Sample test of cone positive definiteness of the block family.

        Checks that ``(p'B^{(i,1)}p, ..., p'B^{(i,m)}p)`` lands in the cone
        interior for random unit directions.  For non-orthant cones positive
        definite blocks do not guarantee this; the check is diagnostic only.
        """
        rng = np.random.default_rng(seed)
        P = rng.normal(size=(directions, self.n))
        P /= np.linalg.norm(P, axis=1, keepdims=True)
        # quad[d, i, l] = p_d' B^{(i,l)} p_d
        quad = np.einsum("dk,ilkj,dj->dil", P, self.blocks, P)
        return bool(np.all(cone.contains_interior_many(quad)))


def init_store(problem: UncertainProblem, x0, mode: str = "identity") -> HessianStore:
    """Initialize curvature blocks at the starting point.

    ``identity`` sets every block to the identity; ``exact_hessian_fd``
    seeds each block with a finite-difference Hessian projected to positive
    definiteness by flooring its eigenvalues.
    """
    x0 = np.ravel(np.asarray(x0, dtype=float))
    if x0.shape[0] != problem.n:
        raise ValueError(f"x0 has dimension {x0.shape[0]}, expected {problem.n}")
    p, m, n = problem.p, problem.m, problem.n
    if mode == "identity":
        blocks = np.broadcast_to(np.eye(n), (p, m, n, n)).copy()
    elif mode == "exact_hessian_fd":
        blocks = np.empty((p, m, n, n))
        for i in range(p):
            for l in range(m):
                H = finite_difference_hessian(problem, x0, i, l)
                blocks[i, l] = floor_to_positive_definite(H)
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    return HessianStore(blocks=blocks)


def floor_to_positive_definite(H: np.ndarray, floor: float = PD_FLOOR) -> np.ndarray:
    """Symmetrize and clip eigenvalues from below."""
    H = 0.5 * (H + H.T)
    w, V = np.linalg.eigh(H)
    return (V * np.maximum(w, floor)) @ V.T


def bfgs_update(store: HessianStore, i: int, s: np.ndarray,
                y_per_component: np.ndarray) -> list[str]:
    """Rank-two update of every block of scenario ``i``.

    Args:
        s: step ``x_new - x_old``.
        y_per_component: (m, n) gradient differences, row ``l`` for
            objective component ``l``.

    Returns:
        Per-component status: ``"updated"`` or ``"skipped"`` (curvature
        safeguard ``s.y > curvature_tol * |s| * |y|`` failed).
    """
    s = np.ravel(np.asarray(s, dtype=float))
    Y = np.atleast_2d(np.asarray(y_per_component, dtype=float))
    if np.linalg.norm(s) == 0.0:
        raise ValueError("step s must be nonzero")
    if Y.shape != (store.m, store.n):
        raise ValueError(f"y stack has shape {Y.shape}, expected {(store.m, store.n)}")

    statuses = []
    snorm = np.linalg.norm(s)
    for l in range(store.m):
        y = Y[l]
        sty = float(s @ y)
        if sty <= store.curvature_tol * snorm * np.linalg.norm(y):
            statuses.append("skipped")
            continue
        B = store.blocks[i, l]
        Bs = B @ s
        stBs = float(s @ Bs)
        if stBs <= 0.0:
            raise EvaluationError(
                f"curvature block ({i}, {l}) lost positive definiteness",
                scenario=i,
            )
        B = B - np.outer(Bs, Bs) / stBs + np.outer(y, y) / sty
        store.blocks[i, l] = 0.5 * (B + B.T)
        statuses.append("updated")
    return statuses


def update_all(store: HessianStore, s: np.ndarray,
               jac_old: np.ndarray, jac_new: np.ndarray) -> np.ndarray:
    """BFGS refresh of all scenarios from stacked (p, n, m) Jacobians.

    Returns a (p, m) boolean array marking blocks that were updated.
    """
    applied = np.zeros((store.p, store.m), dtype=bool)
    for i in range(store.p):
        Y = (jac_new[i] - jac_old[i]).T  # (m, n)
        statuses = bfgs_update(store, i, s, Y)
        applied[i] = [st == "updated" for st in statuses]
    return applied
