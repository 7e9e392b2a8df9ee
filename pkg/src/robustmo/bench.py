"""Random-start campaigns over a problem's sampling box.

Starting points come from per-run seed streams (a child seed sequence keyed
by the run index), so neither the number of runs nor the worker-pool size
changes any individual run.  Campaign artifacts are one runs.csv row per
run, a deterministic stats.json (iteration statistics only; wall times are
machine-dependent and kept out of it) and a times.json with the time tuple.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .problems import UncertainProblem
from .solver import SolveConfig, SolveTrace, solve
from .stats import StatsTuple, compute_stats

THREADS_ENV = "ROBUSTMO_THREADS"


def start_point(problem: UncertainProblem, seed: int, run_index: int) -> np.ndarray:
    """Uniform box sample from the run's own seed stream."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(run_index,))
    return problem.sample_start(np.random.default_rng(ss))


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class CampaignResult:
    problem: str
    starts: int
    seed: int
    traces: list[SolveTrace]
    iteration_stats: StatsTuple | None
    time_stats: StatsTuple | None
    errors: int

    def ok_traces(self) -> list[SolveTrace]:
        return [t for t in self.traces if t.error is None]

    def runs_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        n = len(self.traces[0].x0) if self.traces else 0
        writer.writerow(
            ["run", "status", "iterations", "p_norm_final", "merit_final",
             "time_s"] + [f"x0_{d}" for d in range(n)]
        )
        for run, t in enumerate(self.traces):
            writer.writerow(
                [run, t.status, t.n_steps, repr(t.p_norm_final),
                 repr(t.merit_final), repr(t.total_time_s)]
                + [repr(v) for v in t.x0]
            )
        return buf.getvalue()

    def stats_json(self, config: SolveConfig) -> str:
        statuses = {}
        for t in self.traces:
            statuses[t.status] = statuses.get(t.status, 0) + 1
        payload = {
            "problem": self.problem,
            "starts": self.starts,
            "seed": self.seed,
            "config": config.to_json(),
            "errors": self.errors,
            "statuses": statuses,
            "iterations": None if self.iteration_stats is None
            else self.iteration_stats.to_json(),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def times_json(self) -> str:
        payload = {
            "problem": self.problem,
            "starts": self.starts,
            "time_s": None if self.time_stats is None
            else self.time_stats.to_json(),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def run_campaign(problem: UncertainProblem, starts: int, seed: int,
                 config: SolveConfig | None = None,
                 threads: int | None = None) -> CampaignResult:
    """Solve from ``starts`` random box points; failed runs are excluded
    from the statistics but counted."""
    if starts < 1:
        raise ValueError("starts must be at least 1")
    config = config or SolveConfig(seed=seed)
    threads = threads or worker_count()

    def one(run_index: int) -> SolveTrace:
        return solve(problem, start_point(problem, seed, run_index), config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(one, range(starts)))
    else:
        traces = [one(i) for i in range(starts)]

    good = [t for t in traces if t.error is None]
    iteration_stats = compute_stats([t.n_steps for t in good]) if good else None
    time_stats = compute_stats([t.total_time_s for t in good], time_mode=True) \
        if good else None
    return CampaignResult(
        problem=problem.name, starts=starts, seed=seed, traces=traces,
        iteration_stats=iteration_stats, time_stats=time_stats,
        errors=len(traces) - len(good),
    )
