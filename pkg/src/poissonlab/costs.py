"""End-to-end cost accounting for a surrogate deployment.

Total time is t_dg + t_nt + N * t_pr: data generation plus training plus
N predictions. The break-even count is the smallest N at which that
total strictly undercuts N direct solver runs; ties count as not yet
beneficial. Per-call timings are medians over repeated measurements,
with the raw samples kept for audit.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass

from .errors import ParameterError

# Two ledgers measured on identical workloads should agree to within
# this bound; calibrated on the test machine with sleep stubs.
TIMING_JITTER_SECONDS = 0.02


@dataclass(frozen=True)
class CostLedger:
    """Measured pipeline timings in seconds plus the deployment size N."""

    t_dg: float
    t_nt: float
    t_pr: float
    t_solve: float
    n_predictions: int
    repetitions: int = 1
    pr_samples: tuple = ()
    solve_samples: tuple = ()
    cold_prediction: float | None = None

    def __post_init__(self):
        for name in ("t_dg", "t_nt", "t_pr", "t_solve"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0")
        if self.n_predictions < 0:
            raise ParameterError("n_predictions must be >= 0")
        if self.repetitions < 1:
            raise ParameterError("repetitions must be >= 1")

    def to_dict(self) -> dict:
        return {
            "t_dg": self.t_dg,
            "t_nt": self.t_nt,
            "t_pr": self.t_pr,
            "t_solve": self.t_solve,
            "n_predictions": self.n_predictions,
            "repetitions": self.repetitions,
            "pr_samples": list(self.pr_samples),
            "solve_samples": list(self.solve_samples),
            "cold_prediction": self.cold_prediction,
        }


def total_time(ledger: CostLedger, n_predictions: int | None = None) -> float:
    """t_dg + t_nt + N * t_pr for N predictions (ledger N by default)."""
    n = ledger.n_predictions if n_predictions is None else n_predictions
    return ledger.t_dg + ledger.t_nt + n * ledger.t_pr


def break_even(ledger: CostLedger) -> int | None:
    """Smallest N with t_dg + t_nt + N*t_pr < N*t_solve, or None for never.

    The closed form is floor((t_dg+t_nt)/(t_solve-t_pr)) + 1; a local
    scan afterwards pins down the exact integer regardless of float
    rounding in the division.
    """
    if ledger.t_solve <= 0:
        raise ParameterError("t_solve must be > 0")
    if ledger.t_pr >= ledger.t_solve:
        return None
    setup = ledger.t_dg + ledger.t_nt
    margin = ledger.t_solve - ledger.t_pr

    def beneficial(n: int) -> bool:
        return setup + n * ledger.t_pr < n * ledger.t_solve

    n = max(1, math.floor(setup / margin) + 1)
    while n > 1 and beneficial(n - 1):
        n -= 1
    while not beneficial(n):
        n += 1
    return n


def measure(
    t_dg: float,
    t_nt: float,
    predict_once,
    solve_once,
    n_predictions: int,
    repetitions: int,
) -> CostLedger:
    """Build a ledger from pipeline timings plus fresh per-call measurements.

    predict_once and solve_once are zero-argument callables run
    single-threaded, back to back, on this machine. One untimed-in-the-
    median cold call warms the prediction path first and is recorded
    separately; t_pr and t_solve are medians over `repetitions` calls.
    """
    if repetitions < 1:
        raise ParameterError("repetitions must be >= 1")

    def clock(fn) -> float:
        started = time.perf_counter()
        fn()
        return time.perf_counter() - started

    cold = clock(predict_once)
    pr_samples = tuple(clock(predict_once) for _ in range(repetitions))
    solve_samples = tuple(clock(solve_once) for _ in range(repetitions))
    return CostLedger(
        t_dg=float(t_dg),
        t_nt=float(t_nt),
        t_pr=statistics.median(pr_samples),
        t_solve=statistics.median(solve_samples),
        n_predictions=int(n_predictions),
        repetitions=int(repetitions),
        pr_samples=pr_samples,
        solve_samples=solve_samples,
        cold_prediction=cold,
    )
