"""Uncertain multiobjective problems and the built-in benchmark registry.

A problem is a family of smooth vector objectives ``F(., xi) : R^n -> R^m``
indexed by finitely many scenario vectors ``xi``, ordered by a polyhedral
cone.  Built-ins cover four worked examples (EX1-EX4) and eighteen uncertain
variants of standard multiobjective test problems (P1-P18); each registers an
analytic Jacobian, with a central finite-difference fallback available for
user-supplied objectives.

Objective evaluators broadcast over a leading batch axis: ``x`` of shape
``(..., n)`` yields values of shape ``(..., m)``.  Jacobians are pointwise
and return an ``(n, m)`` matrix whose column ``l`` is the gradient of
component ``l``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cones import PolyhedralCone, orthant
from .errors import EvaluationError

FD_STEP = 1e-6


@dataclass(frozen=True)
class ScenarioGrid:
    """Cartesian scenario grid, optionally truncated to a fixed count.

    Tuples are enumerated in row-major (last axis fastest) order; ``count``
    keeps the first ``count`` of them.
    """

    axes: tuple[np.ndarray, ...]
    count: int | None = None

    @property
    def full_cardinality(self) -> int:
        return math.prod(len(a) for a in self.axes)

    def materialize(self) -> np.ndarray:
        full = self.full_cardinality
        count = full if self.count is None else self.count
        if count > full:
            raise ValueError(f"grid holds {full} tuples, {count} requested")
        idx = itertools.islice(
            itertools.product(*(range(len(a)) for a in self.axes)), count
        )
        return np.array(
            [[self.axes[d][i] for d, i in enumerate(tup)] for tup in idx],
            dtype=float,
        )


def uniform_scenarios(lb, ub, count: int) -> ScenarioGrid:
    """Uniform grid over a scenario box with (at least) ``count`` points.

    One-dimensional boxes use ``count`` equispaced points; multi-dimensional
    boxes use the smallest per-axis resolution whose product reaches
    ``count``, truncated back to ``count`` tuples.
    """
    lb = np.atleast_1d(np.asarray(lb, dtype=float))
    ub = np.atleast_1d(np.asarray(ub, dtype=float))
    r = lb.shape[0]
    if r == 1:
        return ScenarioGrid(axes=(np.linspace(lb[0], ub[0], count),), count=count)
    g = max(2, math.ceil(count ** (1.0 / r)))
    while (g - 1) ** r >= count:
        g -= 1
    while g**r < count:
        g += 1
    axes = tuple(np.linspace(lb[d], ub[d], g) for d in range(r))
    return ScenarioGrid(axes=axes, count=count)


@dataclass(frozen=True)
class UncertainProblem:
    """Finite-scenario uncertain vector objective with its ordering cone.

    Args:
        name: registry name (or a label for user problems).
        n: decision dimension.
        m: objective dimension.
        scenarios: (p, r) matrix of scenario vectors.
        cone: ordering cone on the objective space.
        objective: ``(x, xi) -> values`` evaluator, batched over ``x``.
        jacobian: optional analytic ``(x, xi) -> (n, m)`` evaluator; central
            finite differences are used when absent.
        box: optional ``(lb, ub)`` bounds used only to sample starting points.
        source: provenance tag of the underlying deterministic objective.
    """

    name: str
    n: int
    m: int
    scenarios: np.ndarray
    cone: PolyhedralCone
    objective: Callable[[np.ndarray, np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    box: tuple[np.ndarray, np.ndarray] | None = None
    source: str = "-"

    def __post_init__(self):
        scen = np.atleast_2d(np.asarray(self.scenarios, dtype=float))
        if scen.shape[0] < 1:
            raise ValueError("at least one scenario is required")
        scen.setflags(write=False)
        object.__setattr__(self, "scenarios", scen)
        if self.cone.dim != self.m:
            raise ValueError("cone dimension does not match objective dimension")
        if self.box is not None:
            lb = np.asarray(self.box[0], dtype=float)
            ub = np.asarray(self.box[1], dtype=float)
            if lb.shape != (self.n,) or ub.shape != (self.n,):
                raise ValueError("box bounds must have the decision dimension")
            object.__setattr__(self, "box", (lb, ub))

    @property
    def p(self) -> int:
        return self.scenarios.shape[0]

    @property
    def r(self) -> int:
        return self.scenarios.shape[1]

    def _check_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ValueError(f"x has dimension {x.shape[-1]}, expected {self.n}")
        return x

    def evaluate(self, x, i: int) -> np.ndarray:
        """Objective value for scenario ``i``; raises on non-finite output."""
        x = self._check_x(np.ravel(np.asarray(x, dtype=float)))
        with np.errstate(all="ignore"):
            v = np.asarray(self.objective(x, self.scenarios[i]), dtype=float)
        if not np.all(np.isfinite(v)):
            raise EvaluationError(
                f"objective for scenario {i} is not finite at x={x.tolist()}",
                scenario=i, x=x,
            )
        return v

    def evaluate_image(self, x) -> np.ndarray:
        """All scenario values at ``x``, stacked as a (p, m) array."""
        x = self._check_x(np.ravel(np.asarray(x, dtype=float)))
        out = np.empty((self.p, self.m))
        with np.errstate(all="ignore"):
            for i in range(self.p):
                out[i] = self.objective(x, self.scenarios[i])
        bad = ~np.isfinite(out)
        if bad.any():
            i = int(np.argwhere(bad.any(axis=1))[0, 0])
            raise EvaluationError(
                f"objective for scenario {i} is not finite at x={x.tolist()}",
                scenario=i, x=x,
            )
        return out

    def evaluate_batch(self, X, i: int) -> np.ndarray:
        """Objective values for scenario ``i`` over a batch of points.

        Non-finite rows are returned as-is (callers mask them); batching is
        meant for grid scans where individual points may be out of domain.
        """
        X = self._check_x(X)
        with np.errstate(all="ignore"):
            return np.asarray(self.objective(X, self.scenarios[i]), dtype=float)

    def jacobian_at(self, x, i: int) -> np.ndarray:
        """(n, m) Jacobian for scenario ``i`` (analytic or finite-difference)."""
        x = self._check_x(np.ravel(np.asarray(x, dtype=float)))
        if self.jacobian is None:
            return finite_difference_jacobian(self, x, i)
        with np.errstate(all="ignore"):
            J = np.asarray(self.jacobian(x, self.scenarios[i]), dtype=float)
        if J.shape != (self.n, self.m):
            raise EvaluationError(
                f"jacobian for scenario {i} has shape {J.shape}, "
                f"expected {(self.n, self.m)}", scenario=i, x=x,
            )
        if not np.all(np.isfinite(J)):
            raise EvaluationError(
                f"jacobian for scenario {i} is not finite at x={x.tolist()}",
                scenario=i, x=x,
            )
        return J

    def jacobian_stack(self, x) -> np.ndarray:
        """Jacobians for every scenario, stacked as (p, n, m)."""
        return np.stack([self.jacobian_at(x, i) for i in range(self.p)])

    def sample_start(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform sample from the starting box."""
        if self.box is None:
            raise ValueError(f"problem {self.name} has no sampling box")
        lb, ub = self.box
        return lb + (ub - lb) * rng.random(self.n)

    def supports_batch(self) -> bool:
        """Whether the objective broadcasts over a leading batch axis."""
        probe = np.zeros((2, self.n))
        if self.box is not None:
            probe = np.broadcast_to(
                (self.box[0] + self.box[1]) / 2.0, (2, self.n)
            ).copy()
        try:
            with np.errstate(all="ignore"):
                out = np.asarray(self.objective(probe, self.scenarios[0]))
            return out.shape == (2, self.m)
        except Exception:
            return False


def finite_difference_jacobian(problem: UncertainProblem, x, i: int) -> np.ndarray:
    """Central-difference Jacobian with per-axis step ``1e-6 * max(1, |x_j|)``."""
    x = np.ravel(np.asarray(x, dtype=float))
    J = np.empty((problem.n, problem.m))
    for j in range(problem.n):
        h = FD_STEP * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        J[j] = (problem.evaluate(xp, i) - problem.evaluate(xm, i)) / (2.0 * h)
    return J


def finite_difference_hessian(problem: UncertainProblem, x, i: int, l: int,
                              step: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian of objective component ``l``, scenario ``i``."""
    x = np.ravel(np.asarray(x, dtype=float))
    n = problem.n
    H = np.empty((n, n))
    h = np.array([step * max(1.0, abs(x[j])) for j in range(n)])

    def f(y):
        return problem.evaluate(y, i)[l]

    f0 = f(x)
    for a in range(n):
        ea = np.zeros(n)
        ea[a] = h[a]
        H[a, a] = (f(x + ea) - 2.0 * f0 + f(x - ea)) / (h[a] ** 2)
        for b in range(a + 1, n):
            eb = np.zeros(n)
            eb[b] = h[b]
            H[a, b] = H[b, a] = (
                f(x + ea + eb) - f(x + ea - eb) - f(x - ea + eb) + f(x - ea - eb)
            ) / (4.0 * h[a] * h[b])
    return H


def gradient_check(problem: UncertainProblem, points: int = 20,
                   seed: int = 0, rtol: float = 1e-4) -> float:
    """Largest relative gap between analytic and finite-difference Jacobians.

    Probes random points in the sampling box over all scenarios; used as a
    registration self-check in the test suite.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        x = problem.sample_start(rng)
        for i in range(problem.p):
            J = problem.jacobian_at(x, i)
            Jfd = finite_difference_jacobian(problem, x, i)
            err = np.max(np.abs(J - Jfd)) / max(1.0, np.max(np.abs(Jfd)))
            worst = max(worst, float(err))
    return worst


# ---------------------------------------------------------------------------
# built-in registry
# ---------------------------------------------------------------------------


def _wedge_cone() -> PolyhedralCone:
    # narrow planar cone between the rays of slope 1/3 and 3
    return PolyhedralCone(np.array([[3.0, -1.0], [-1.0, 3.0]]), np.ones(2))


def _box(lb, ub):
    return (np.asarray(lb, dtype=float), np.asarray(ub, dtype=float))


def _ex1() -> UncertainProblem:
    def objective(x, xi):
        t = x[..., 0]
        s = xi[0]
        f1 = 2.0 * t**2 + np.exp(t / 10.0) + (10.0 * s - 3.0) / 2.0
        f2 = 5.0 * t * np.cos(t) + ((3.0 - 10.0 * s) / 2.0) * np.sin(t) ** 2
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        t = x[0]
        s = xi[0]
        df1 = 4.0 * t + np.exp(t / 10.0) / 10.0
        df2 = 5.0 * np.cos(t) - 5.0 * t * np.sin(t) \
            + ((3.0 - 10.0 * s) / 2.0) * np.sin(2.0 * t)
        return np.array([[df1, df2]])

    return UncertainProblem(
        name="EX1", n=1, m=2,
        scenarios=np.array([[0.1], [0.2], [0.3], [0.4]]),
        cone=_wedge_cone(),
        objective=objective, jacobian=jacobian,
        box=_box([-4.7], [4.7]),
    )


def _ex2() -> UncertainProblem:
    def theta(xi):
        return 2.0 * np.pi * (10.0 * xi[0] - 1.0) / 60.0

    def objective(x, xi):
        t = theta(xi)
        x1, x2 = x[..., 0], x[..., 1]
        f1 = x1**2 + x2**2 + 0.5 * np.sin(t) * np.cos(t) ** 2 \
            + 2.0 * np.exp(x1 + x2)
        f2 = 2.0 * x1**2 + 2.0 * x2**2 + 0.5 * np.cos(t) ** 2
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        x1, x2 = x
        E = 2.0 * np.exp(x1 + x2)
        return np.array([[2.0 * x1 + E, 4.0 * x1], [2.0 * x2 + E, 4.0 * x2]])

    return UncertainProblem(
        name="EX2", n=2, m=2,
        scenarios=np.linspace(0.1, 4.5, 45)[:, None],
        cone=orthant(2),
        objective=objective, jacobian=jacobian,
        box=_box([-1.5, -1.0], [1.5, 0.5]),
    )


def _ex3() -> UncertainProblem:
    def objective(x, xi):
        s = xi[0]
        t = 2.0 * np.pi * (10.0 * s - 1.0) / 50.0
        x1, x2 = x[..., 0], x[..., 1]
        f1 = x1**2 + 0.5 * np.sin(t) - 0.1 * s * x1
        f2 = 2.0 * x1**2 + 0.5 * np.cos(t) + 0.2 * s * x2
        f3 = x1**2 + x2**2 + 10.0 * s
        return np.stack([f1, f2, f3], axis=-1)

    def jacobian(x, xi):
        s = xi[0]
        x1, x2 = x
        return np.array([
            [2.0 * x1 - 0.1 * s, 4.0 * x1, 2.0 * x1],
            [0.0, 0.2 * s, 2.0 * x2],
        ])

    return UncertainProblem(
        name="EX3", n=2, m=3,
        scenarios=np.linspace(0.1, 5.0, 50)[:, None],
        cone=orthant(3),
        objective=objective, jacobian=jacobian,
        box=_box([-2.0, -2.0], [2.0, 2.0]),
    )


def _ex4() -> UncertainProblem:
    anchors = np.array([[0.0, 0.0], [8.0, 0.0], [0.0, 8.0]])
    V = np.linspace(-1.0, 1.0, 10)
    grid = ScenarioGrid(axes=(V, V))

    def objective(x, xi):
        d = x[..., None, :] - anchors - xi  # (..., 3, 2)
        return 0.5 * np.sum(d * d, axis=-1)

    def jacobian(x, xi):
        return (x[None, :] - anchors - xi).T  # column l = x - anchor_l - xi

    return UncertainProblem(
        name="EX4", n=2, m=3,
        scenarios=grid.materialize(),
        cone=orthant(3),
        objective=objective, jacobian=jacobian,
        box=_box([-50.0, -50.0], [50.0, 50.0]),
        source="location",
    )


def _p1() -> UncertainProblem:
    def objective(x, xi):
        t = x[..., 0]
        s = xi[0]
        f1 = t**2 + 2.0 * (s * t + 1.0) ** 2 + 2.0 * (s * t - 1.0) ** 2 + t**3
        f2 = (t - 2.0 * s) ** 2 + s**3 * t + s * t**3
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        t = x[0]
        s = xi[0]
        df1 = 2.0 * t + 8.0 * s**2 * t + 3.0 * t**2
        df2 = 2.0 * (t - 2.0 * s) + s**3 + 3.0 * s * t**2
        return np.array([[df1, df2]])

    return UncertainProblem(
        name="P1", n=1, m=2,
        scenarios=uniform_scenarios([-2.0], [2.0], 40).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-1.0], [0.5]), source="MOP1",
    )


def _p2() -> UncertainProblem:
    def common(s):
        return (10.0 + np.exp(np.sin(2.0 * np.pi * s / 50.0))
                - np.sin(4.0 * np.pi * s / 50.0)) / 140.0

    def objective(x, xi):
        t = x[..., 0]
        s = xi[0]
        g = common(s)
        f1 = t + g + s * t
        f2 = np.cos(3.0 * t) + 1.0 / (1.0 + np.exp(2.0 * t)) + g
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        t = x[0]
        s = xi[0]
        e2 = np.exp(2.0 * t)
        df1 = 1.0 + s
        df2 = -3.0 * np.sin(3.0 * t) - 2.0 * e2 / (1.0 + e2) ** 2
        return np.array([[df1, df2]])

    return UncertainProblem(
        name="P2", n=1, m=2,
        scenarios=uniform_scenarios([1.0], [9.0], 35).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-1.0], [-0.7]), source="New1",
    )


def _p3() -> UncertainProblem:
    def objective(x, xi):
        s1, s2 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = s1 * x1**2 + s2 * x2**2 + s2 * (x2 - 5.0) ** 2 \
            + (s1 * x1 - 2.0) ** 2 + (s2 * x2 - 2.0) ** 2
        f2 = s1 * x1**2 + s2 * x2**2 + (s1 * x1 - 5.0) ** 2
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        s1, s2 = xi
        x1, x2 = x
        return np.array([
            [2.0 * s1 * x1 + 2.0 * s1 * (s1 * x1 - 2.0),
             2.0 * s1 * x1 + 2.0 * s1 * (s1 * x1 - 5.0)],
            [2.0 * s2 * x2 + 2.0 * s2 * (x2 - 5.0) + 2.0 * s2 * (s2 * x2 - 2.0),
             2.0 * s2 * x2],
        ])

    return UncertainProblem(
        name="P3", n=2, m=2,
        scenarios=uniform_scenarios([-2.0, -2.0], [2.0, 2.0], 40).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-3.0, -3.0], [5.0, 5.0]), source="BK1",
    )


def _p4() -> UncertainProblem:
    def objective(x, xi):
        s1, s2 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = x1**2 + s2 * x2**2 + s1 * x1**2 + 8.0 * s2 * x2
        f2 = s1 * (x1 + 1.0) ** 2 + x2**2 + s1 * x1**2 + s2 * x2**2
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        s1, s2 = xi
        x1, x2 = x
        return np.array([
            [2.0 * x1 + 2.0 * s1 * x1,
             2.0 * s1 * (x1 + 1.0) + 2.0 * s1 * x1],
            [2.0 * s2 * x2 + 8.0 * s2,
             2.0 * x2 + 2.0 * s2 * x2],
        ])

    return UncertainProblem(
        name="P4", n=2, m=2,
        scenarios=uniform_scenarios([0.8, 1.0], [1.0, 1.2], 40).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-5.0, -5.0], [50.0, 50.0]), source="LRS1",
    )


def _p5() -> UncertainProblem:
    def objective(x, xi):
        s1, s2 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = (s1 * x1**2 - 1.0) ** 2 + s2 * (x1 - x2) ** 2
        f2 = (s2 * x2 - 3.0) ** 2 + s1 * (x1 - x2) ** 2
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        s1, s2 = xi
        x1, x2 = x
        d = x1 - x2
        return np.array([
            [4.0 * s1 * x1 * (s1 * x1**2 - 1.0) + 2.0 * s2 * d,
             2.0 * s1 * d],
            [-2.0 * s2 * d,
             2.0 * s2 * (s2 * x2 - 3.0) - 2.0 * s1 * d],
        ])

    return UncertainProblem(
        name="P5", n=2, m=2,
        scenarios=uniform_scenarios([1.0, 1.0], [2.0, 2.0], 25).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-1.0, -1.0], [5.0, 5.0]), source="SP1",
    )


def _p6() -> UncertainProblem:
    def objective(x, xi):
        s1, s2 = xi
        x1, x2 = x[..., 0], x[..., 1]
        D = x1**2 + s2 * x2**2 + 1.0
        f1 = s1 / D + s1**2 * x1**2 + (s2 * x2 - 1.0) ** 2
        f2 = (s1 * x1**2 + 3.0 * x2**2 + 1.0) / s2 + 2.0 * s1 * x1 + 2.0 * s2 * x2
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        s1, s2 = xi
        x1, x2 = x
        D = x1**2 + s2 * x2**2 + 1.0
        return np.array([
            [-2.0 * s1 * x1 / D**2 + 2.0 * s1**2 * x1,
             2.0 * s1 * x1 / s2 + 2.0 * s1],
            [-2.0 * s1 * s2 * x2 / D**2 + 2.0 * s2 * (s2 * x2 - 1.0),
             6.0 * x2 / s2 + 2.0 * s2],
        ])

    return UncertainProblem(
        name="P6", n=2, m=2,
        scenarios=uniform_scenarios([1.0, 0.5], [1.5, 1.0], 30).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-3.0, -3.0], [3.0, 3.0]), source="VU1",
    )


def _p7() -> UncertainProblem:
    def objective(x, xi):
        s1, s2 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = s2 + x1**2 + (s1 * x1 - 2.0) ** 2 + (s2 * x2 - 2.0) ** 2
        f2 = s2 + s1**2 + s1 * x1**2 + s2 * x2**2 + (s1 * x1 - 2.0) ** 3
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        s1, s2 = xi
        x1, x2 = x
        return np.array([
            [2.0 * x1 + 2.0 * s1 * (s1 * x1 - 2.0),
             2.0 * s1 * x1 + 3.0 * s1 * (s1 * x1 - 2.0) ** 2],
            [2.0 * s2 * (s2 * x2 - 2.0),
             2.0 * s2 * x2],
        ])

    return UncertainProblem(
        name="P7", n=2, m=2,
        scenarios=uniform_scenarios([1.2, 0.6], [1.5, 1.0], 20).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-1.0, -1.0], [0.0, 0.0]), source="New2",
    )


def _p8() -> UncertainProblem:
    def objective(x, xi):
        s1, s2 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = -1.05 * s1 * x1**2 - 0.98 * s2 * x2**2 \
            + (s1 * x1 - 2.0) ** 2 + (s2 * x2 + 2.0) ** 2
        f2 = -0.99 * s1 * (x1 - 3.0) ** 2 - 1.03 * s2 * (x2 - 2.5) ** 2 \
            + 5.0 * s1 * x1**2 + s2 * x2**2
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        s1, s2 = xi
        x1, x2 = x
        return np.array([
            [-2.1 * s1 * x1 + 2.0 * s1 * (s1 * x1 - 2.0),
             -1.98 * s1 * (x1 - 3.0) + 10.0 * s1 * x1],
            [-1.96 * s2 * x2 + 2.0 * s2 * (s2 * x2 + 2.0),
             -2.06 * s2 * (x2 - 2.5) + 2.0 * s2 * x2],
        ])

    return UncertainProblem(
        name="P8", n=2, m=2,
        scenarios=uniform_scenarios([-1.5, -1.5], [0.0, 0.0], 40).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-3.0, -3.0], [5.0, 5.0]), source="Lovison1",
    )


def _p9() -> UncertainProblem:
    def objective(x, xi):
        s1, s2, s3 = xi
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        f1 = 2.0 * x1**2 + (s1 - 3.0) / 2.0 + 4.0 * x2 * (s2 - 3.0) / 2.0
        f2 = (x1**2 / 4.0) * np.cos(x2) - np.cos(x3) ** 3 * (s1 - 3.0) / 2.0 + s3
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        s1, s2, s3 = xi
        x1, x2, x3 = x
        return np.array([
            [4.0 * x1, (x1 / 2.0) * np.cos(x2)],
            [2.0 * (s2 - 3.0), -(x1**2 / 4.0) * np.sin(x2)],
            [0.0, 3.0 * np.cos(x3) ** 2 * np.sin(x3) * (s1 - 3.0) / 2.0],
        ])

    return UncertainProblem(
        name="P9", n=3, m=2,
        scenarios=uniform_scenarios([-2.0] * 3, [2.0] * 3, 40).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-100000.0] * 3, [100000.0] * 3), source="GKZ9",
    )


def _p10() -> UncertainProblem:
    def objective(x, xi):
        s = xi[0]
        x1, x2, x3, x4, x5 = (x[..., j] for j in range(5))
        f1 = x1**2 + x2**2 + x3**2 + x4**2 + x5**2 + s**2
        f2 = (3.0 + s) * x1 + 2.0 * x2 - x3 / 3.0 + (x4 - x5) ** 3 + s * x1**2
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        s = xi[0]
        d45 = 3.0 * (x[3] - x[4]) ** 2
        return np.array([
            [2.0 * x[0], 3.0 + s + 2.0 * s * x[0]],
            [2.0 * x[1], 2.0],
            [2.0 * x[2], -1.0 / 3.0],
            [2.0 * x[3], d45],
            [2.0 * x[4], -d45],
        ])

    return UncertainProblem(
        name="P10", n=5, m=2,
        scenarios=uniform_scenarios([0.008], [0.012], 25).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-20.0] * 5, [20.0] * 5), source="DD1",
    )


def _p11() -> UncertainProblem:
    n = 20

    def objective(x, xi):
        f1 = np.mean(xi**2 * x**2, axis=-1)
        f2 = np.mean((x - 2.0 * xi) ** 2 + xi**2, axis=-1)
        return np.stack([f1, f2], axis=-1)

    def jacobian(x, xi):
        df1 = 2.0 * xi**2 * x / n
        df2 = 2.0 * (x - 2.0 * xi) / n
        return np.stack([df1, df2], axis=-1)

    return UncertainProblem(
        name="P11", n=n, m=2,
        scenarios=uniform_scenarios([-2.0] * n, [1.0] * n, 20).materialize(),
        cone=orthant(2), objective=objective, jacobian=jacobian,
        box=_box([-9.0] * n, [-7.0] * n), source="Jin1",
    )


def _p12() -> UncertainProblem:
    def objective(x, xi):
        s1, s2 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = (s1 * x1 - 2.0) ** 2 / 2.0 + (s2 * x2 + 1.0) ** 2 / 13.0 \
            + 3.0 * s1 + x1**2 + x2**2 + s1 * s2
        f2 = (s1 * x1 + s2 * x2 - 3.0) ** 2 / 36.0 \
            + (-s1 * x1 + s2 * x2 + 2.0) ** 2 / 8.0 - 17.0 * s2 + x1 + x2 + s2
        f3 = (s1 * x1 + 2.0 * s2 * x2 - 1.0) ** 2 / 175.0 \
            + (-s1 * x1 + 2.0 * s2 * x2) ** 2 / 17.0 \
            - 13.0 * s1 * s2 + s2 * x1**2 - 9.0 * x2
        return np.stack([f1, f2, f3], axis=-1)

    def jacobian(x, xi):
        s1, s2 = xi
        x1, x2 = x
        u = s1 * x1 + s2 * x2 - 3.0
        v = -s1 * x1 + s2 * x2 + 2.0
        a = s1 * x1 + 2.0 * s2 * x2 - 1.0
        b = -s1 * x1 + 2.0 * s2 * x2
        return np.array([
            [s1 * (s1 * x1 - 2.0) + 2.0 * x1,
             s1 * u / 18.0 - s1 * v / 4.0 + 1.0,
             2.0 * s1 * a / 175.0 - 2.0 * s1 * b / 17.0 + 2.0 * s2 * x1],
            [2.0 * s2 * (s2 * x2 + 1.0) / 13.0 + 2.0 * x2,
             s2 * u / 18.0 + s2 * v / 4.0 + 1.0,
             4.0 * s2 * a / 175.0 + 4.0 * s2 * b / 17.0 - 9.0],
        ])

    return UncertainProblem(
        name="P12", n=2, m=3,
        scenarios=uniform_scenarios([-2.0, -2.0], [1.0, 1.0], 30).materialize(),
        cone=orthant(3), objective=objective, jacobian=jacobian,
        box=_box([-400.0, -400.0], [400.0, 400.0]), source="MOP7",
    )


def _p13() -> UncertainProblem:
    def objective(x, xi):
        s1, s2 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = x1 + (x2 - 1.5) + 0.25 * np.sin(4.0 * np.pi * (s1 - 1.0) / 7.0) \
            + s2 / 100.0 + x1**2
        f2 = 2.0 * (x1 - 1.0) ** 2 + 2.0 * x2**2 \
            + 0.25 * np.cos(4.0 * np.pi * (s2 - 1.0) / 7.0) \
            + 2.0 * s1 / 100.0 + x2**2
        f3 = s1 * x1**2 + x2**2 + s1 * s2
        return np.stack([f1, f2, f3], axis=-1)

    def jacobian(x, xi):
        s1, s2 = xi
        x1, x2 = x
        return np.array([
            [1.0 + 2.0 * x1, 4.0 * (x1 - 1.0), 2.0 * s1 * x1],
            [1.0, 6.0 * x2, 2.0 * x2],
        ])

    return UncertainProblem(
        name="P13", n=2, m=3,
        scenarios=uniform_scenarios([1.0, 1.0], [1.5, 2.0], 30).materialize(),
        cone=orthant(3), objective=objective, jacobian=jacobian,
        box=_box([1.0, 1.0], [1.5, 1.5]), source="GKZ6",
    )


def _p14() -> UncertainProblem:
    # third additive term of f1 is read as the scenario component xi_3: the
    # decision space is two-dimensional, so no third coordinate exists
    def objective(x, xi):
        s1, s2, s3 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = s1**2 * x1**2 + s2 * (x2 - 1.0) ** 2 + s3 + s1 * x1**2 + x2**2
        f2 = x1**2 + (s1 * x2 - 1.0) ** 2 + x1**4 + s2 * x2**2 + 1.0
        f3 = s1 * (x1 - 1.0) ** 2 + s2 * x2**2 + s3 + 5.0 * s1 * x1 + x2 + 3.0
        return np.stack([f1, f2, f3], axis=-1)

    def jacobian(x, xi):
        s1, s2, s3 = xi
        x1, x2 = x
        return np.array([
            [2.0 * s1**2 * x1 + 2.0 * s1 * x1,
             2.0 * x1 + 4.0 * x1**3,
             2.0 * s1 * (x1 - 1.0) + 5.0 * s1],
            [2.0 * s2 * (x2 - 1.0) + 2.0 * x2,
             2.0 * s1 * (s1 * x2 - 1.0) + 2.0 * s2 * x2,
             2.0 * s2 * x2 + 1.0],
        ])

    return UncertainProblem(
        name="P14", n=2, m=3,
        scenarios=uniform_scenarios(
            [1.0, 0.5, -0.5], [1.5, 1.0, 2.5], 20
        ).materialize(),
        cone=orthant(3), objective=objective, jacobian=jacobian,
        box=_box([-2.0, -2.0], [2.0, 2.0]), source="VFM1",
    )


def _p15() -> UncertainProblem:
    def objective(x, xi):
        s1, s2, s3 = xi
        x1, x2 = x[..., 0], x[..., 1]
        f1 = (s1 * x1 - 1.0) ** 2 + (s2 * x2 - 1.0) ** 2 + s1 * x1**2 + x2**2
        f2 = (s2 * x1 - 1.5) ** 2 + (s1 * x2 - 1.0) ** 2 + x1**4 + s2 * x2**2
        f3 = s2 * (x1 - 1.0) ** 2 + s1 * (s2 * x2 - 1.0) ** 2 + s3 \
            + 5.0 * s1 * x1 + x2
        return np.stack([f1, f2, f3], axis=-1)

    def jacobian(x, xi):
        s1, s2, s3 = xi
        x1, x2 = x
        return np.array([
            [2.0 * s1 * (s1 * x1 - 1.0) + 2.0 * s1 * x1,
             2.0 * s2 * (s2 * x1 - 1.5) + 4.0 * x1**3,
             2.0 * s2 * (x1 - 1.0) + 5.0 * s1],
            [2.0 * s2 * (s2 * x2 - 1.0) + 2.0 * x2,
             2.0 * s1 * (s1 * x2 - 1.0) + 2.0 * s2 * x2,
             2.0 * s1 * s2 * (s2 * x2 - 1.0) + 1.0],
        ])

    return UncertainProblem(
        name="P15", n=2, m=3,
        scenarios=uniform_scenarios(
            [-2.5, -2.5, -0.5], [2.5, 2.5, 2.5], 40
        ).materialize(),
        cone=orthant(3), objective=objective, jacobian=jacobian,
        box=_box([-4.0, -4.0], [4.0, 4.0]), source="MHHM2",
    )


def _p16() -> UncertainProblem:
    def objective(x, xi):
        f1 = np.sum(xi * x + xi**2, axis=-1)
        f2 = 1.0 + 9.0 * np.sum(xi**2 * x, axis=-1)
        f3 = 1.0 - np.sqrt(f1 / f2)
        return np.stack([f1, f2, f3], axis=-1)

    def jacobian(x, xi):
        f1 = np.sum(xi * x + xi**2)
        f2 = 1.0 + 9.0 * np.sum(xi**2 * x)
        df1 = xi
        df2 = 9.0 * xi**2
        ratio = f1 / f2
        dratio = (df1 * f2 - f1 * df2) / f2**2
        df3 = -0.5 / np.sqrt(ratio) * dratio
        return np.stack([df1, df2, df3], axis=-1)

    return UncertainProblem(
        name="P16", n=10, m=3,
        scenarios=uniform_scenarios([-1.0] * 10, [1.0] * 10, 10).materialize(),
        cone=orthant(3), objective=objective, jacobian=jacobian,
        box=_box([0.2] * 10, [0.8] * 10), source="ZDT1",
    )


def _p17() -> UncertainProblem:
    def objective(x, xi):
        f1 = np.sum(xi * x, axis=-1)
        f2 = 5.0 + 10.0 * np.sum(xi * x**2, axis=-1)
        f3 = 2.0 - (f1 / f2) ** 2
        return np.stack([f1, f2, f3], axis=-1)

    def jacobian(x, xi):
        f1 = np.sum(xi * x)
        f2 = 5.0 + 10.0 * np.sum(xi * x**2)
        df1 = xi
        df2 = 20.0 * xi * x
        dratio = (df1 * f2 - f1 * df2) / f2**2
        df3 = -2.0 * (f1 / f2) * dratio
        return np.stack([df1, df2, df3], axis=-1)

    return UncertainProblem(
        name="P17", n=10, m=3,
        scenarios=uniform_scenarios([-0.8] * 10, [0.7] * 10, 10).materialize(),
        cone=orthant(3), objective=objective, jacobian=jacobian,
        box=_box([0.2] * 10, [0.6] * 10), source="ZDT2",
    )


def _p18() -> UncertainProblem:
    n = 10
    w = np.arange(1, n + 1, dtype=float)

    def objective(x, xi):
        f1 = np.sum(w * (xi * x - w) ** 4, axis=-1) / n
        f2 = np.exp(np.sum(x, axis=-1) / n)
        f3 = np.sum(w * (n - w + 1.0) * np.exp(-xi * x), axis=-1) / (n * (n + 1.0))
        return np.stack([f1, f2, f3], axis=-1)

    def jacobian(x, xi):
        df1 = 4.0 * w * xi * (xi * x - w) ** 3 / n
        df2 = np.full(n, np.exp(np.sum(x) / n) / n)
        df3 = -w * (n - w + 1.0) * xi * np.exp(-xi * x) / (n * (n + 1.0))
        return np.stack([df1, df2, df3], axis=-1)

    return UncertainProblem(
        name="P18", n=n, m=3,
        scenarios=uniform_scenarios([-1.0] * n, [2.0] * n, 10).materialize(),
        cone=orthant(3), objective=objective, jacobian=jacobian,
        box=_box([-2.0] * n, [2.0] * n), source="FDS",
    )


_REGISTRY: dict[str, Callable[[], UncertainProblem]] = {
    "EX1": _ex1, "EX2": _ex2, "EX3": _ex3, "EX4": _ex4,
    "P1": _p1, "P2": _p2, "P3": _p3, "P4": _p4, "P5": _p5, "P6": _p6,
    "P7": _p7, "P8": _p8, "P9": _p9, "P10": _p10, "P11": _p11, "P12": _p12,
    "P13": _p13, "P14": _p14, "P15": _p15, "P16": _p16, "P17": _p17,
    "P18": _p18,
}


def registry_names() -> list[str]:
    return list(_REGISTRY)


def registry_get(name: str) -> UncertainProblem:
    """Build a registered benchmark problem by name."""
    try:
        builder = _REGISTRY[name]
    except KeyError:
        raise LookupError(
            f"unknown problem {name!r}; available: {', '.join(_REGISTRY)}"
        ) from None
    return builder()


def load_problem_file(path) -> UncertainProblem:
    """Build a problem from a JSON file.

    The file names a built-in objective (``base``) and may override its
    structure: the scenario set (explicit ``scenarios`` list or a
    ``scenario_grid`` with either ``axes`` or ``lb``/``ub``/``count``), the
    ordering ``cone`` (``rows``, ``e``, optional ``strict_tol``) and the
    sampling ``box`` (``lb``/``ub``).  Objective formulas themselves are not
    parsed from files.
    """
    with open(path) as fh:
        spec = json.load(fh)
    if "base" not in spec:
        raise ValueError("problem file must name a built-in objective as 'base'")
    base = registry_get(str(spec["base"]))

    scenarios = base.scenarios
    if "scenarios" in spec:
        scenarios = np.atleast_2d(np.asarray(spec["scenarios"], dtype=float))
    elif "scenario_grid" in spec:
        g = spec["scenario_grid"]
        if "axes" in g:
            grid = ScenarioGrid(
                axes=tuple(np.asarray(a, dtype=float) for a in g["axes"]),
                count=g.get("count"),
            )
        else:
            grid = uniform_scenarios(g["lb"], g["ub"], int(g["count"]))
        scenarios = grid.materialize()
    if scenarios.shape[1] != base.r:
        raise ValueError(
            f"scenario dimension {scenarios.shape[1]} does not match "
            f"base problem ({base.r})"
        )

    cone = base.cone
    if "cone" in spec:
        c = spec["cone"]
        cone = PolyhedralCone(
            np.asarray(c["rows"], dtype=float),
            np.asarray(c["e"], dtype=float),
            strict_tol=float(c.get("strict_tol", 1e-10)),
        )

    box = base.box
    if "box" in spec:
        box = (np.asarray(spec["box"]["lb"], dtype=float),
               np.asarray(spec["box"]["ub"], dtype=float))

    return UncertainProblem(
        name=str(spec.get("name", f"{base.name}*")),
        n=base.n, m=base.m,
        scenarios=scenarios, cone=cone,
        objective=base.objective, jacobian=base.jacobian,
        box=box, source=base.source,
    )
