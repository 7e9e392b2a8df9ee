"""Polyhedral ordering cones and the scalarization they induce.

A cone is described by inequality rows ``A`` so that ``K = {z : A z >= 0}``
componentwise, together with a strictly interior point ``e`` (``A e > 0``).
``K`` induces the partial order ``z <= y  iff  y - z in K`` and its strict
variant through ``int K``.  The Gerstewitz scalarization

    theta(z) = min{ t : t*e - z in K }

has the closed form ``max_i (a_i . z) / (a_i . e)`` for polyhedral cones,
which is what :meth:`PolyhedralCone.gerstewitz` evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConeDefinitionError


@dataclass(frozen=True)
class PolyhedralCone:
    """Pointed, solid, convex polyhedral cone ``{z : rows @ z >= 0}``.

    Args:
        rows: (q, m) inequality matrix; each row is an element of the dual cone.
        interior_point: point ``e`` with ``rows @ e > 0`` strictly.
        strict_tol: membership tolerance shared by the strict and non-strict
            tests (non-strict allows ``-strict_tol``, strict requires
            ``> strict_tol``).
    """

    rows: np.ndarray
    interior_point: np.ndarray
    strict_tol: float = 1e-10

    # rows @ interior_point, cached for the scalarization denominator
    _scale: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        e = np.asarray(self.interior_point, dtype=float).ravel()
        if rows.ndim != 2:
            raise ConeDefinitionError("rows must form a 2-D matrix")
        q, m = rows.shape
        if e.shape != (m,):
            raise ConeDefinitionError(
                f"interior point has dimension {e.shape[0]}, expected {m}"
            )
        if self.strict_tol < 0:
            raise ConeDefinitionError("strict_tol must be nonnegative")
        if q < m:
            raise ConeDefinitionError(
                f"{q} rows cannot describe a pointed cone in dimension {m}"
            )
        scale = rows @ e
        if not np.all(scale > 0):
            raise ConeDefinitionError(
                "interior point is not strictly interior (some row . e <= 0)"
            )
        # K ∩ -K = {z : rows @ z = 0} is the null space of rows, so the cone
        # is pointed exactly when rows has full column rank.
        if np.linalg.matrix_rank(rows) < m:
            raise ConeDefinitionError("cone contains a line (rows are rank deficient)")
        rows.setflags(write=False)
        e.setflags(write=False)
        scale.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "interior_point", e)
        object.__setattr__(self, "_scale", scale)

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    def _check_dim(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.dim:
            raise ValueError(f"vector has dimension {z.shape[-1]}, expected {self.dim}")
        return z

    def contains(self, z) -> bool:
        """Whether ``z`` belongs to the cone (within ``strict_tol``)."""
        z = self._check_dim(np.ravel(np.asarray(z, dtype=float)))
        return bool(np.all(self.rows @ z >= -self.strict_tol))

    def contains_interior(self, z) -> bool:
        """Whether ``z`` belongs to the interior of the cone."""
        z = self._check_dim(np.ravel(np.asarray(z, dtype=float)))
        return bool(np.all(self.rows @ z > self.strict_tol))

    def contains_many(self, Z) -> np.ndarray:
        """Vectorized :meth:`contains` over the leading axes of ``Z``."""
        Z = self._check_dim(Z)
        return np.all(Z @ self.rows.T >= -self.strict_tol, axis=-1)

    def contains_interior_many(self, Z) -> np.ndarray:
        """Vectorized :meth:`contains_interior` over the leading axes of ``Z``."""
        Z = self._check_dim(Z)
        return np.all(Z @ self.rows.T > self.strict_tol, axis=-1)

    def gerstewitz(self, z) -> float:
        """Gerstewitz scalarization ``min{t : t*e in z + K}``.

        Evaluated in closed form as the largest ratio ``(a_i . z)/(a_i . e)``
        over the inequality rows.
        """
        z = self._check_dim(np.ravel(np.asarray(z, dtype=float)))
        return float(np.max((self.rows @ z) / self._scale))

    def gerstewitz_many(self, Z) -> np.ndarray:
        """Vectorized :meth:`gerstewitz` over the leading axes of ``Z``."""
        Z = self._check_dim(Z)
        return np.max((Z @ self.rows.T) / self._scale, axis=-1)

    def lipschitz_bound(self) -> float:
        """A Lipschitz constant of the scalarization: ``max_i |a_i|/(a_i.e)``."""
        return float(np.max(np.linalg.norm(self.rows, axis=1) / self._scale))

    def to_json(self) -> dict:
        return {
            "rows": self.rows.tolist(),
            "e": self.interior_point.tolist(),
            "strict_tol": self.strict_tol,
        }


def orthant(m: int, strict_tol: float = 1e-10) -> PolyhedralCone:
    """The nonnegative orthant of dimension ``m`` with ``e = (1, ..., 1)``."""
    return PolyhedralCone(np.eye(m), np.ones(m), strict_tol=strict_tol)
