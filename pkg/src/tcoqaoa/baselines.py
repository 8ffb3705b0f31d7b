"""Comparison solvers sharing the Ising objective of :mod:`tcoqaoa.ising`."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .ising import QuadraticForm, quadratic_value
from .loch import optimize_window, random_spins
from .qaoa import QaoaConfig, decode, run_qaoa
from .qsim import spin_columns
from .record import RunRecord, TraceEntry

BRUTE_FORCE_CAP = 26


@dataclass(frozen=True)
class DivQaoaConfig:
    sub_size: int = 7
    total_runs: int = 13
    qaoa: QaoaConfig = field(default_factory=QaoaConfig)
    seed: int = 0


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 10
    eval_budget: int = 400_000
    crossover_rate: float = 1.0
    mutation_rate: float | None = None  # None -> 1/n
    seed: int = 0

    def __post_init__(self) -> None:
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if not 0 <= self.crossover_rate <= 1:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if self.mutation_rate is not None and not 0 <= self.mutation_rate <= 1:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if self.eval_budget < self.pop_size:
            raise ValueError("eval_budget must cover the initial population")


def coverage_windows(n: int, size: int, rng: np.random.Generator) -> list[np.ndarray]:
    """A random partition into ``ceil(n/size)`` windows; the short last block is topped up."""
    perm = rng.permutation(n)
    windows = []
    for k in range(math.ceil(n / size)):
        block = perm[k * size:(k + 1) * size]
        if block.size < size:
            rest = np.setdiff1d(np.arange(n), block)
            block = np.concatenate([block, rng.choice(rest, size - block.size, replace=False)])
        windows.append(block)
    return windows


def div_qaoa(form: QuadraticForm, config: DivQaoaConfig) -> RunRecord:
    """QAOA over randomly drawn windows, each variable covered at least once."""
    n, N = form.n, config.sub_size
    if n < N:
        raise ValueError(f"problem has {n} variables, fewer than the sub-problem size {N}")
    minimum = math.ceil(n / N)
    if config.total_runs < minimum:
        raise ValueError(
            f"total_runs={config.total_runs} cannot cover {n} variables; need >= {minimum}"
        )
    start = time.perf_counter_ns()
    rng = np.random.default_rng(config.seed)
    record = RunRecord("div", config.seed, config={
        "N": N, "p": config.qaoa.depth, "total_runs": config.total_runs,
    })
    z = random_spins(n, rng)
    fval = quadratic_value(form, z, True)
    record.observe(z, fval)
    record.trace.append(TraceEntry(0, fval, 0, time.perf_counter_ns() - start))
    windows = coverage_windows(n, N, rng)
    for run in range(config.total_runs):
        if run < len(windows):
            window = windows[run]
        else:
            window = rng.choice(n, N, replace=False)
        seed = int(rng.integers(2**63))
        z, fval, qaoa_ns = optimize_window(form, z, fval, window, config.qaoa, seed)
        record.qaoa_time_ns += qaoa_ns
        record.num_eva += 1
        record.observe(z, fval)
        record.trace.append(
            TraceEntry(run + 1, fval, record.num_eva, time.perf_counter_ns() - start)
        )
    # the solution after the last window is the reported final one
    record.final_fval = quadratic_value(form, z, True)
    record.final_z = z.copy()
    record.wall_time_ns = time.perf_counter_ns() - start
    return record


def _fitness(form: QuadraticForm, pop: np.ndarray) -> np.ndarray:
    # row by row through quadratic_value so equal states score bit-identically
    # across solvers; a batched product rounds differently in the last place
    return np.array([quadratic_value(form, z, True) for z in pop])


def ga_minimize(form: QuadraticForm, config: GaConfig) -> RunRecord:
    """Generational GA with binary tournament, single-point crossover and bit-flip mutation.

    The best individual survives each generation unchanged.  ``num_eva`` is
    the evaluation count at which the final best fitness was first reached.
    """
    start = time.perf_counter_ns()
    n = form.n
    rng = np.random.default_rng(config.seed)
    mu = config.pop_size
    p_mut = 1.0 / n if config.mutation_rate is None else config.mutation_rate
    record = RunRecord("ga", config.seed, config={
        "pop_size": mu, "eval_budget": config.eval_budget,
    })

    pop = rng.choice(np.array([-1, 1], dtype=np.int8), size=(mu, n))
    fit = _fitness(form, pop)
    evals = mu
    best_at = evals
    i = int(np.argmin(fit))
    record.observe(pop[i], fit[i])
    generation = 0
    # trace num_eva is the evaluation at which the best so far was first reached
    record.trace.append(TraceEntry(0, record.best_fval, best_at, time.perf_counter_ns() - start))

    while evals + (mu - 1) <= config.eval_budget:
        generation += 1
        n_children = mu - 1
        a = rng.integers(mu, size=(n_children, 2))
        b = rng.integers(mu, size=(n_children, 2))
        pick = lambda c: np.where(fit[c[:, 0]] <= fit[c[:, 1]], c[:, 0], c[:, 1])
        mothers, fathers = pop[pick(a)], pop[pick(b)]
        children = mothers.copy()
        if n > 1:
            do_cross = rng.random(n_children) < config.crossover_rate
            cuts = rng.integers(1, n, size=n_children)
            tail = np.arange(n)[None, :] >= cuts[:, None]
            swap = tail & do_cross[:, None]
            children[swap] = fathers[swap]
        flips = rng.random(children.shape) < p_mut
        children[flips] *= -1
        child_fit = _fitness(form, children)

        elite = int(np.argmin(fit))
        pop = np.vstack([pop[elite:elite + 1], children])
        fit = np.concatenate([fit[elite:elite + 1], child_fit])
        for k in range(n_children):
            if record.observe(children[k], child_fit[k]):
                best_at = evals + k + 1
        evals += n_children
        record.trace.append(
            TraceEntry(generation, record.best_fval, best_at, time.perf_counter_ns() - start)
        )

    record.final_fval, record.final_z = record.best_fval, record.best_z.copy()
    record.num_eva = best_at
    record.config["evaluations"] = evals
    record.wall_time_ns = time.perf_counter_ns() - start
    return record


def random_search(form: QuadraticForm, iterations: int, seed: int = 0) -> RunRecord:
    """Best of ``iterations`` uniformly random assignments."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    start = time.perf_counter_ns()
    rng = np.random.default_rng(seed)
    record = RunRecord("rs", seed, config={"iterations": iterations})
    for it in range(1, iterations + 1):
        z = random_spins(form.n, rng)
        record.observe(z, quadratic_value(form, z, True))
        record.num_eva = it
        record.trace.append(
            TraceEntry(it, record.best_fval, it, time.perf_counter_ns() - start)
        )
    record.final_fval, record.final_z = record.best_fval, record.best_z.copy()
    record.wall_time_ns = time.perf_counter_ns() - start
    return record


def qaoa_direct(form: QuadraticForm, config: QaoaConfig) -> RunRecord:
    """A single QAOA execution over all variables (at most 24 of them)."""
    start = time.perf_counter_ns()
    record = RunRecord("qaoa-direct", config.seed, config={"N": form.n, "p": config.depth})
    result = run_qaoa(form, config)
    record.qaoa_time_ns = time.perf_counter_ns() - start
    fval = result.best_energy + form.constant
    record.observe(result.spins, fval)
    record.num_eva = 1
    record.wall_time_ns = time.perf_counter_ns() - start
    record.trace.append(TraceEntry(1, fval, 1, record.wall_time_ns))
    return record


def brute_force(form: QuadraticForm, cap: int = BRUTE_FORCE_CAP,
                chunk: int = 1 << 16) -> tuple[np.ndarray, float]:
    """Exact minimum by enumeration; ties go to the lowest encoding (bit j = 1 -> +1)."""
    n = form.n
    if n > cap:
        raise ValueError(f"brute force is capped at {cap} variables, got {n}")
    best_idx, best_val = 0, np.inf
    total = 1 << n
    for lo in range(0, total, chunk):
        hi = min(total, lo + chunk)
        S = spin_columns(lo, hi, n)
        vals = 0.5 * np.einsum("bi,bi->b", S @ form.pair_matrix, S) + S @ form.linear
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_idx, best_val = lo + k, float(vals[k])
    z = decode(best_idx, n)
    return z, quadratic_value(form, z, True)
