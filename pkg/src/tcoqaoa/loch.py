"""Impact-guided decomposition around QAOA.

Each iteration ranks variables by how much flipping them alone would lower
the fitness, then solves consecutive windows of ``sub_size`` variables from
the front of that ranking with QAOA while all other spins stay clamped.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .ising import QuadraticForm, clamp, impact_order, quadratic_value
from .qaoa import QaoaConfig, QaoaResult, run_qaoa
from .qsim import MAX_QUBITS
from .record import RunRecord, TraceEntry

# fval differences at or below this count as "no reduction"
IMPROVEMENT_TOL = 1e-12


@dataclass(frozen=True)
class LochConfig:
    sub_size: int = 7
    num_fraction: float = 0.15
    patience: int = 3
    qaoa: QaoaConfig = field(default_factory=QaoaConfig)
    seed: int = 0
    max_iterations: int = 10_000

    def __post_init__(self) -> None:
        if not 1 <= self.sub_size <= MAX_QUBITS:
            raise ValueError(f"sub_size must lie in [1, {MAX_QUBITS}]")
        if not 0 < self.num_fraction <= 1:
            raise ValueError("num_fraction must lie in (0, 1]")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def windows_per_iteration(n: int, sub_size: int, num_fraction: float) -> int:
    """QAOA runs per iteration: ``ceil(num / N)`` with ``num = max(round(f n), N)``.

    Capped at ``n // N`` so windows stay disjoint and full-sized.
    """
    num = max(round_half_up(num_fraction * n), sub_size)
    return min(math.ceil(num / sub_size), n // sub_size)


def random_spins(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=n)


def accept_subsolution(current_z, window, sub_result: QaoaResult, form: QuadraticForm,
                       fval: float | None = None) -> tuple[np.ndarray, float]:
    """Write the window spins from ``sub_result`` back unless that makes things worse."""
    window = np.asarray(window, dtype=np.intp)
    current_z = np.asarray(current_z, dtype=np.int8)
    new_spins = sub_result.spins
    if new_spins.size != window.size:
        raise ValueError(f"sub-result has {new_spins.size} spins for a window of {window.size}")
    if fval is None:
        fval = quadratic_value(form, current_z, True)
    sub = clamp(form, window, current_z)
    old_spins = current_z[window]
    delta = quadratic_value(sub, new_spins, False) - quadratic_value(sub, old_spins, False)
    if delta > 0:
        return current_z.copy(), float(fval)
    z = current_z.copy()
    z[window] = new_spins
    return z, float(fval + delta)


def optimize_window(form: QuadraticForm, z: np.ndarray, fval: float, window,
                    qaoa: QaoaConfig, seed: int) -> tuple[np.ndarray, float, int]:
    """Clamp, solve with QAOA, write back.  Returns ``(z, fval, qaoa_ns)``."""
    sub = clamp(form, window, z)
    t0 = time.perf_counter_ns()
    result = run_qaoa(sub, qaoa.with_seed(seed))
    qaoa_ns = time.perf_counter_ns() - t0
    z, fval = accept_subsolution(z, window, result, form, fval)
    return z, fval, qaoa_ns


def solve(form: QuadraticForm, config: LochConfig) -> RunRecord:
    n, N = form.n, config.sub_size
    if n < N:
        raise ValueError(
            f"problem has {n} variables, fewer than the sub-problem size {N}; "
            "run run_qaoa on it directly"
        )
    start = time.perf_counter_ns()
    rng = np.random.default_rng(config.seed)
    record = RunRecord("loch", config.seed, config={
        "N": N, "p": config.qaoa.depth, "num_fraction": config.num_fraction,
        "patience": config.patience,
    })
    runs_per_iter = windows_per_iteration(n, N, config.num_fraction)

    z = random_spins(n, rng)
    fval = quadratic_value(form, z, True)
    record.observe(z, fval)
    record.trace.append(TraceEntry(0, fval, 0, time.perf_counter_ns() - start))

    stalled = 0
    iteration = 0
    while stalled < config.patience and iteration < config.max_iterations:
        iteration += 1
        order, _ = impact_order(form, z, fval)
        for w in range(runs_per_iter):
            window = order[w * N:(w + 1) * N]
            seed = int(rng.integers(2**63))
            z, fval, qaoa_ns = optimize_window(form, z, fval, window, config.qaoa, seed)
            record.qaoa_time_ns += qaoa_ns
            record.num_eva += 1
        # resync to avoid drift from incremental updates
        fval = quadratic_value(form, z, True)
        previous_best = record.best_fval
        record.observe(z, fval)
        if fval < previous_best - IMPROVEMENT_TOL:
            stalled = 0
        else:
            stalled += 1
        record.trace.append(
            TraceEntry(iteration, fval, record.num_eva, time.perf_counter_ns() - start)
        )

    record.wall_time_ns = time.perf_counter_ns() - start
    return record
