"""Maximal-element structure of finite image sets.

Given the image ``{F(x, xi_i)}`` of a point under every scenario, these
routines find its maximal and weakly maximal elements with respect to the
ordering cone, group scenarios attaining the same maximal value, and
enumerate the partition set: the Cartesian product of those groups, whose
tuples select one representative scenario per distinct maximal value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .cones import PolyhedralCone
from .errors import CapacityError

VALUE_TOL = 1e-9
PARTITION_CAP = 4096


@dataclass(frozen=True)
class ScenarioImage:
    """Image of a point with its maximal-element structure.

    Attributes:
        values: (p, m) image points, row i for scenario i.
        maximal_ids: sorted scenario indices attaining a maximal value.
        weak_maximal_ids: sorted scenario indices attaining a weakly maximal
            value.
        omega: number of distinct maximal values.
        value_groups: one sorted index list per distinct maximal value,
            ordered by smallest member; their union is ``maximal_ids``.
    """

    values: np.ndarray
    maximal_ids: tuple[int, ...]
    weak_maximal_ids: tuple[int, ...]
    omega: int
    value_groups: tuple[tuple[int, ...], ...]

    def group_value(self, j: int) -> np.ndarray:
        """Representative value of the j-th group."""
        return self.values[self.value_groups[j][0]]


@dataclass(frozen=True)
class PartitionSet:
    """All ways of picking one scenario per distinct maximal value."""

    tuples: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)


def max_elements(
    values: np.ndarray, cone: PolyhedralCone, value_tol: float = VALUE_TOL
) -> ScenarioImage:
    """Maximal-element structure of a finite image set.

    A point is maximal when no distinct image point dominates it through the
    cone; points equal up to ``value_tol`` (max-norm) count as the same point
    and are grouped together.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    p = values.shape[0]
    if p == 0:
        raise ValueError("image set is empty")

    diff = values[None, :, :] - values[:, None, :]  # diff[i, j] = v_j - v_i
    equal = np.max(np.abs(diff), axis=-1) <= value_tol
    proj = diff @ cone.rows.T
    dominates = np.all(proj >= -cone.strict_tol, axis=-1) & ~equal
    strictly_dominates = np.all(proj > cone.strict_tol, axis=-1) & ~equal

    maximal = ~dominates.any(axis=1)
    weak = ~strictly_dominates.any(axis=1)

    maximal_ids = tuple(int(i) for i in np.flatnonzero(maximal))
    weak_ids = tuple(int(i) for i in np.flatnonzero(weak))

    # group maximal scenarios by (near-)equal value, keyed on the first member
    groups: list[list[int]] = []
    for i in maximal_ids:
        for g in groups:
            if equal[g[0], i]:
                g.append(i)
                break
        else:
            groups.append([i])
    value_groups = tuple(tuple(g) for g in groups)

    return ScenarioImage(
        values=values,
        maximal_ids=maximal_ids,
        weak_maximal_ids=weak_ids,
        omega=len(value_groups),
        value_groups=value_groups,
    )


def weak_max_elements(values: np.ndarray, cone: PolyhedralCone,
                      value_tol: float = VALUE_TOL) -> tuple[int, ...]:
    """Indices of the weakly maximal elements of a finite image set."""
    return max_elements(values, cone, value_tol).weak_maximal_ids


def partition_set(image: ScenarioImage, cap: int = PARTITION_CAP) -> PartitionSet:
    """Enumerate the partition set in lexicographic order.

    Raises:
        CapacityError: if the product of group sizes exceeds ``cap``.
    """
    size = 1
    for g in image.value_groups:
        size *= len(g)
    if size > cap:
        raise CapacityError(
            f"partition set has {size} tuples, exceeding the cap of {cap}"
        )
    return PartitionSet(tuples=tuple(itertools.product(*image.value_groups)))


@dataclass(frozen=True)
class RegularityReport:
    """Sampling-based regularity diagnostic (not a certificate).

    ``max_equals_weak`` compares the maximal and weakly maximal index sets at
    the probed point; ``omega_constant`` reports whether the number of
    distinct maximal values stayed constant over random points in a ball.
    """

    max_equals_weak: bool
    omega: int
    omega_constant: bool
    omega_values: tuple[int, ...]
    radius: float
    samples: int

    @property
    def regular(self) -> bool:
        return self.max_equals_weak and self.omega_constant

    def to_json(self) -> dict:
        return {
            "regular_on_samples": self.regular,
            "max_equals_weak": self.max_equals_weak,
            "omega": self.omega,
            "omega_constant": self.omega_constant,
            "omega_values_seen": list(self.omega_values),
            "radius": self.radius,
            "samples": self.samples,
        }


def check_regularity(problem, x, radius: float, samples: int,
                     seed: int | None = None,
                     value_tol: float = VALUE_TOL) -> RegularityReport:
    """Probe regularity of a point by sampling a ball around it."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)

    at_x = max_elements(problem.evaluate_image(x), problem.cone, value_tol)
    omegas = {at_x.omega}
    for _ in range(samples):
        u = rng.normal(size=x.shape[0])
        u *= radius * rng.random() ** (1.0 / x.shape[0]) / np.linalg.norm(u)
        si = max_elements(problem.evaluate_image(x + u), problem.cone, value_tol)
        omegas.add(si.omega)

    return RegularityReport(
        max_equals_weak=at_x.maximal_ids == at_x.weak_maximal_ids,
        omega=at_x.omega,
        omega_constant=len(omegas) == 1,
        omega_values=tuple(sorted(omegas)),
        radius=float(radius),
        samples=int(samples),
    )
