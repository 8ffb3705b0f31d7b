"""QAOA on a single (sub-)problem: ansatz, parameter search, solution extraction."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import optim, qsim
from .ising import QuadraticForm


DEFAULT_SHOTS = 1024


class ExpectationMode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class QaoaConfig:
    """Settings for one QAOA execution.

    ``shots=None`` draws ``max(1024, 2**N)`` samples for an ``N``-qubit
    problem, so wide windows are not read out from a thin sample.
    """

    depth: int = 1
    optimizer_budget: int = 100
    shots: int | None = None
    expectation_mode: ExpectationMode = ExpectationMode.EXACT
    seed: int = 0
    rho_begin: float = 0.5
    rho_end: float = 1e-4

    def __post_init__(self) -> None:
        object.__setattr__(self, "expectation_mode", ExpectationMode(self.expectation_mode))
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.optimizer_budget < 2 * self.depth + 2:
            raise ValueError(
                f"optimizer_budget must be >= 2p + 2 = {2 * self.depth + 2}"
            )

    def with_seed(self, seed: int) -> "QaoaConfig":
        return replace(self, seed=int(seed))

    def shots_for(self, num_qubits: int) -> int:
        if self.shots is not None:
            return self.shots
        return max(DEFAULT_SHOTS, 1 << num_qubits)


@dataclass(frozen=True)
class QaoaResult:
    best_bitstring: int
    best_energy: float
    optimal_params: np.ndarray
    expectation_trace: tuple[float, ...]
    evaluations_used: int
    num_qubits: int

    @property
    def spins(self) -> np.ndarray:
        return decode(self.best_bitstring, self.num_qubits)


def decode(bitstring: int, num_qubits: int) -> np.ndarray:
    """Bit j of the basis index -> spin j (0 -> -1, 1 -> +1)."""
    bitstring = int(bitstring)
    if not 0 <= bitstring < 1 << num_qubits:
        raise ValueError(f"bitstring {bitstring} out of range for {num_qubits} qubits")
    bits = (bitstring >> np.arange(num_qubits)) & 1
    return (2 * bits - 1).astype(np.int8)


def encode(spins) -> int:
    spins = np.asarray(spins)
    return int(((spins > 0).astype(np.int64) << np.arange(spins.size)).sum())


def initial_parameters(depth: int, rng: np.random.Generator) -> np.ndarray:
    """``[gamma_1..gamma_p, beta_1..beta_p]`` with gamma in [0, 2pi), beta in [0, pi)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    gammas = rng.uniform(0.0, 2 * np.pi, depth)
    betas = rng.uniform(0.0, np.pi, depth)
    return np.concatenate([gammas, betas])


def prepare_state(energy: qsim.DiagonalEnergy, params: np.ndarray) -> qsim.StateVector:
    p = len(params) // 2
    state = qsim.init_plus(energy.num_qubits)
    for gamma, beta in zip(params[:p], params[p:]):
        qsim.apply_phase(state, energy, gamma)
        qsim.apply_mixer(state, beta)
    return state


def expectation_function(energy: qsim.DiagonalEnergy, mode=ExpectationMode.EXACT,
                         shots: int = 1024, rng: np.random.Generator | None = None):
    """Map 2p parameters to the ansatz expectation of the problem Hamiltonian."""
    mode = ExpectationMode(mode)
    if mode is ExpectationMode.EXACT:
        def f(params):
            return qsim.expectation(prepare_state(energy, params), energy)
    else:
        if rng is None:
            raise ValueError("sampled expectation needs a generator")

        def f(params):
            draws = qsim.sample(prepare_state(energy, params), shots, rng)
            table = energy.table
            if table is None:
                return float(np.mean([energy.energy(x) for x in draws]))
            return float(table[draws].mean())
    return f


def run_qaoa(form: QuadraticForm, config: QaoaConfig) -> QaoaResult:
    """Optimize the 2p angles for ``form`` and return the best sampled assignment.

    The constant of ``form`` is ignored; ``best_energy`` excludes it.
    """
    if form.n > qsim.MAX_QUBITS:
        raise ValueError(
            f"{form.n} variables exceed the {qsim.MAX_QUBITS}-qubit cap; "
            "decompose the problem (loch solver or div_qaoa) instead"
        )
    rng = np.random.default_rng(config.seed)
    energy = qsim.DiagonalEnergy(form)
    shots = config.shots_for(form.n)
    objective = expectation_function(energy, config.expectation_mode, shots, rng)
    handle = optim.ObjectiveHandle(2 * config.depth, objective, config.optimizer_budget)
    start = initial_parameters(config.depth, rng)
    report = optim.minimize(handle, start, config.rho_begin, config.rho_end)

    state = prepare_state(energy, report.best_point)
    draws = np.unique(qsim.sample(state, shots, rng))
    if energy.table is not None:
        sample_energies = energy.table[draws]
    else:
        sample_energies = np.array([energy.energy(x) for x in draws])
    # np.unique sorts, so argmin picks the lowest index among ties
    k = int(np.argmin(sample_energies))
    return QaoaResult(
        best_bitstring=int(draws[k]),
        best_energy=float(sample_energies[k]),
        optimal_params=report.best_point,
        expectation_trace=report.history,
        evaluations_used=report.evaluations,
        num_qubits=form.n,
    )
