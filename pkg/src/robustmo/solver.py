"""Outer quasi-Newton loop with cone-valued Armijo line search.

Each iteration recomputes the maximal-element structure of the current
image, solves the direction subproblem over the partition set, terminates
when the direction norm falls below tolerance, otherwise backtracks over the
halving step sequence until the vector-valued sufficient-decrease condition

    F(x + tau p, xi_bj)  <=_K  F(x, xi_bj) + gamma tau d_j      for all j

holds for the selected scenarios, then refreshes the curvature blocks of
every scenario.  A full per-iteration trace is kept so descent properties
can be re-verified after the fact.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .direction import DUAL_TOL, solve_step2
from .errors import CapacityError, EvaluationError, SubproblemError
from .hessians import HessianStore, init_store, update_all
from .problems import UncertainProblem
from .setops import PARTITION_CAP, VALUE_TOL, max_elements, partition_set

STATUS_STATIONARY = "StationaryPoint"
STATUS_MAX_ITERS = "MaxIters"
STATUS_STEP_FLOOR = "StepFloor"
STATUS_ERROR = "Error"


@dataclass(frozen=True)
class SolveConfig:
    """Run parameters of the outer loop."""

    gamma: float = 0.1
    p_norm_tol: float = 1e-4
    max_iters: int = 1000
    min_step_exponent: int = 30
    subproblem_tol: float = DUAL_TOL
    hessian_init: str = "identity"
    value_tol: float = VALUE_TOL
    partition_cap: int = PARTITION_CAP
    stat_tol: float = 1e-3
    seed: int | None = None

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("gamma must lie in (0, 1)")
        if self.p_norm_tol <= 0 or self.subproblem_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "p_norm_tol": self.p_norm_tol,
            "max_iters": self.max_iters,
            "min_step_exponent": self.min_step_exponent,
            "subproblem_tol": self.subproblem_tol,
            "hessian_init": self.hessian_init,
            "value_tol": self.value_tol,
            "partition_cap": self.partition_cap,
            "stat_tol": self.stat_tol,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class IterationRecord:
    """State and step data of one outer iteration."""

    k: int
    x: tuple[float, ...]
    omega: int
    partition_size: int
    beta: tuple[int, ...]
    p: tuple[float, ...]
    p_norm: float
    phi: float
    merit: float
    tau: float | None
    model_decrements: tuple[tuple[float, ...], ...]
    regularized: bool
    rejected_steps: int
    time_ms: float

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "x": list(self.x),
            "omega": self.omega,
            "partition_size": self.partition_size,
            "beta": list(self.beta),
            "p": list(self.p),
            "p_norm": self.p_norm,
            "phi": self.phi,
            "merit": self.merit,
            "tau": self.tau,
            "model_decrements": [list(d) for d in self.model_decrements],
            "regularized": self.regularized,
            "rejected_steps": self.rejected_steps,
            "time_ms": self.time_ms,
        }


@dataclass
class SolveTrace:
    """Full record of one solve."""

    problem: str
    config: SolveConfig
    x0: tuple[float, ...]
    iterations: list[IterationRecord] = field(default_factory=list)
    status: str = STATUS_ERROR
    x_final: tuple[float, ...] = ()
    merit_final: float = float("nan")
    p_norm_final: float = float("nan")
    total_time_s: float = 0.0
    error: str | None = None

    @property
    def n_steps(self) -> int:
        """Number of accepted steps (iterations that moved the point)."""
        return sum(1 for r in self.iterations if r.tau is not None)

    def to_json(self) -> dict:
        return {
            "problem": self.problem,
            "config": self.config.to_json(),
            "x0": list(self.x0),
            "status": self.status,
            "iterations": self.n_steps,
            "x_final": list(self.x_final),
            "merit_final": self.merit_final,
            "p_norm_final": self.p_norm_final,
            "total_time_s": self.total_time_s,
            "error": self.error,
            "trace": [r.to_json() for r in self.iterations],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow([
            "k", "tau", "p_norm", "phi", "merit", "omega", "partition_size",
            "regularized", "rejected_steps", "time_ms", "x", "p", "beta",
        ])
        for r in self.iterations:
            writer.writerow([
                r.k, "" if r.tau is None else repr(r.tau), repr(r.p_norm),
                repr(r.phi), repr(r.merit), r.omega, r.partition_size,
                int(r.regularized), r.rejected_steps, repr(r.time_ms),
                ";".join(repr(v) for v in r.x),
                ";".join(repr(v) for v in r.p),
                ";".join(str(b) for b in r.beta),
            ])
        return buf.getvalue()


def model_decrements(jacobians: np.ndarray, blocks: np.ndarray,
                     beta: tuple[int, ...], p: np.ndarray) -> np.ndarray:
    """Quadratic-model objective changes ``J_j' p + 1/2 (p' B_j p)_l``.

    Shape (omega, m); row j belongs to selected scenario ``beta[j]``.
    """
    sel = list(beta)
    lin = np.einsum("jnl,n->jl", jacobians[sel], p)
    quad = 0.5 * np.einsum("jlab,a,b->jl", blocks[sel], p, p)
    return lin + quad


def armijo_step(problem: UncertainProblem, x: np.ndarray, beta: tuple[int, ...],
                p: np.ndarray, decrements: np.ndarray, gamma: float,
                min_step_exponent: int = 30) -> tuple[float | None, int]:
    """Largest halving-sequence step satisfying the cone inequality.

    Trial points whose evaluation fails count as rejected steps.  Returns
    ``(tau, rejected)`` with ``tau = None`` when the floor ``2**-exponent``
    is underrun.
    """
    x = np.asarray(x, dtype=float)
    base = {j: problem.evaluate(x, i) for j, i in enumerate(beta)}
    rejected = 0
    tau = 1.0
    for _ in range(min_step_exponent + 1):
        ok = True
        for j, i in enumerate(beta):
            try:
                trial = problem.evaluate(x + tau * p, i)
            except EvaluationError:
                ok = False
                break
            rhs = base[j] + gamma * tau * decrements[j]
            if not problem.cone.contains(rhs - trial):
                ok = False
                break
        if ok:
            return tau, rejected
        rejected += 1
        tau *= 0.5
    return None, rejected


def solve(problem: UncertainProblem, x0, config: SolveConfig | None = None) -> SolveTrace:
    """Run the outer loop from ``x0`` and return the full trace."""
    config = config or SolveConfig()
    x = np.ravel(np.asarray(x0, dtype=float)).copy()
    if x.shape[0] != problem.n:
        raise ValueError(f"x0 has dimension {x.shape[0]}, expected {problem.n}")
    trace = SolveTrace(problem=problem.name, config=config, x0=tuple(x.tolist()))
    t_start = time.perf_counter()

    def finalize(status, merit=None, p_norm=None, error=None):
        trace.status = status
        trace.x_final = tuple(x.tolist())
        if merit is not None:
            trace.merit_final = float(merit)
        if p_norm is not None:
            trace.p_norm_final = float(p_norm)
        trace.error = error
        trace.total_time_s = time.perf_counter() - t_start
        return trace

    try:
        store = init_store(problem, x, mode=config.hessian_init)
    except (EvaluationError, ValueError) as exc:
        return finalize(STATUS_ERROR, error=str(exc))

    jacs = None
    for k in range(config.max_iters + 1):
        t_iter = time.perf_counter()
        try:
            values = problem.evaluate_image(x)
            if jacs is None:
                jacs = problem.jacobian_stack(x)
            image = max_elements(values, problem.cone, config.value_tol)
            merit = float(np.max(problem.cone.gerstewitz_many(values)))
            pset = partition_set(image, cap=config.partition_cap)
            step2 = solve_step2(problem, x, store, tol=config.subproblem_tol,
                                image=image, partition=pset, jacobians=jacs)
        except (EvaluationError, CapacityError, SubproblemError) as exc:
            return finalize(STATUS_ERROR, error=str(exc))

        p = step2.p
        p_norm = float(np.linalg.norm(p))

        if p_norm <= config.p_norm_tol:
            trace.iterations.append(IterationRecord(
                k=k, x=tuple(x.tolist()), omega=image.omega,
                partition_size=len(pset), beta=step2.beta,
                p=tuple(p.tolist()), p_norm=p_norm, phi=step2.value,
                merit=merit, tau=None, model_decrements=(),
                regularized=step2.regularized, rejected_steps=0,
                time_ms=(time.perf_counter() - t_iter) * 1e3,
            ))
            return finalize(STATUS_STATIONARY, merit=merit, p_norm=p_norm)

        if k == config.max_iters:
            return finalize(STATUS_MAX_ITERS, merit=merit, p_norm=p_norm)

        dec = model_decrements(jacs, store.blocks, step2.beta, p)
        tau, rejected = armijo_step(problem, x, step2.beta, p, dec,
                                    config.gamma, config.min_step_exponent)

        trace.iterations.append(IterationRecord(
            k=k, x=tuple(x.tolist()), omega=image.omega,
            partition_size=len(pset), beta=step2.beta,
            p=tuple(p.tolist()), p_norm=p_norm, phi=step2.value, merit=merit,
            tau=tau, model_decrements=tuple(tuple(r) for r in dec),
            regularized=step2.regularized, rejected_steps=rejected,
            time_ms=(time.perf_counter() - t_iter) * 1e3,
        ))

        if tau is None:
            return finalize(STATUS_STEP_FLOOR, merit=merit, p_norm=p_norm)

        x_new = x + tau * p
        try:
            jacs_new = problem.jacobian_stack(x_new)
        except EvaluationError as exc:
            x = x_new
            return finalize(STATUS_ERROR, error=str(exc))
        update_all(store, tau * p, jacs, jacs_new)
        x = x_new
        jacs = jacs_new

    # not reachable: the loop always returns
    return finalize(STATUS_MAX_ITERS)
