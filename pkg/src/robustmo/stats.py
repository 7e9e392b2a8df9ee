"""Campaign summary tuples: (min, max, mean, median, mode, sd).

Pure-Python arithmetic so an external recomputation from the emitted CSV
reproduces the printed values exactly.  The standard deviation is the
sample one (zero for a single observation); the mode is the most frequent
value with ties broken toward the smallest, computed over raw values for
iteration counts and over values rounded to four decimals for times.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass


@dataclass(frozen=True)
class StatsTuple:
    min: float
    max: float
    mean: float
    median: float
    mode: float
    sd: float

    def formatted(self) -> str:
        def fmt(v):
            return f"{v:.4f}".rstrip("0").rstrip(".") if float(v).is_integer() \
                else f"{v:.4f}"
        return "(" + ", ".join(fmt(v) for v in
                               (self.min, self.max, self.mean, self.median,
                                self.mode, self.sd)) + ")"

    def to_json(self) -> dict:
        return {
            "min": self.min, "max": self.max, "mean": self.mean,
            "median": self.median, "mode": self.mode, "sd": self.sd,
        }


def _median(values: list[float]) -> float:
    s = sorted(values)
    n = len(s)
    mid = n // 2
    if n % 2 == 1:
        return float(s[mid])
    return (s[mid - 1] + s[mid]) / 2.0


def _mode(values: list[float]) -> float:
    counts = Counter(values)
    best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
    return float(best[0])


def compute_stats(values, time_mode: bool = False) -> StatsTuple:
    """Summary tuple of a nonempty sample.

    Args:
        values: observations (ints for iteration counts, floats for times).
        time_mode: bucket values to four decimals before taking the mode.
    """
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("cannot summarize an empty sample")
    n = len(vals)
    mean = math.fsum(vals) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
        sd = math.sqrt(var)
    else:
        sd = 0.0
    mode_vals = [round(v, 4) for v in vals] if time_mode else vals
    return StatsTuple(
        min=min(vals), max=max(vals), mean=mean,
        median=_median(vals), mode=_mode(mode_vals), sd=sd,
    )
