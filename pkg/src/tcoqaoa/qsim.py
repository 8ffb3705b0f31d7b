"""Statevector kernel for the QAOA ansatz.

Basis index ``x`` has qubit ``j`` in bit ``j``.  Measured bit 0 maps to spin
-1 (test case selected), bit 1 to spin +1.
"""

from __future__ import annotations

import numpy as np

from .ising import QuadraticForm

MAX_QUBITS = 24
TABLE_CAP = 20
_CHUNK = 1 << 16


class StateVector:
    """Mutable register of ``2**num_qubits`` amplitudes, owned by one run."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        num_qubits = int(amplitudes.size).bit_length() - 1
        if amplitudes.ndim != 1 or amplitudes.size != 1 << num_qubits or num_qubits < 1:
            raise ValueError(f"amplitude vector of size {amplitudes.size} is not 2**N, N >= 1")
        self.num_qubits = num_qubits
        self.amplitudes = amplitudes

    @classmethod
    def basis(cls, index: int, num_qubits: int) -> "StateVector":
        amp = np.zeros(1 << num_qubits, dtype=np.complex128)
        amp[index] = 1.0
        return cls(amp)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sum(self.probabilities()))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())


def spin_columns(start: int, stop: int, num_qubits: int) -> np.ndarray:
    """Spins (+-1) of basis indices ``start..stop-1``, shape ``(stop-start, N)``."""
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(num_qubits, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.float64)


def energies_for_range(form: QuadraticForm, start: int, stop: int) -> np.ndarray:
    """Values of ``form`` (constant excluded) for basis indices in ``[start, stop)``."""
    S = spin_columns(start, stop, form.n)
    return 0.5 * np.einsum("bi,bi->b", S @ form.pair_matrix, S) + S @ form.linear


class DiagonalEnergy:
    """Problem Hamiltonian diagonal for a quadratic form of size ``N``.

    A full table is kept when ``N <= table_cap``; larger registers compute
    energies chunk by chunk on demand.
    """

    def __init__(self, form: QuadraticForm, table_cap: int = TABLE_CAP):
        if form.n > MAX_QUBITS:
            raise ValueError(f"{form.n} qubits exceeds the cap of {MAX_QUBITS}")
        self.source = form
        self.num_qubits = form.n
        self.table: np.ndarray | None = None
        if form.n <= table_cap:
            self.table = energies_for_range(form, 0, 1 << form.n)

    def __len__(self) -> int:
        return 1 << self.num_qubits

    def chunks(self):
        """Yield ``(start, stop, energies)`` covering every basis index."""
        size = len(self)
        if self.table is not None:
            yield 0, size, self.table
            return
        for start in range(0, size, _CHUNK):
            stop = min(size, start + _CHUNK)
            yield start, stop, energies_for_range(self.source, start, stop)

    def energy(self, index: int) -> float:
        if self.table is not None:
            return float(self.table[index])
        return float(energies_for_range(self.source, index, index + 1)[0])


def _check_sizes(state: StateVector, energy: DiagonalEnergy) -> None:
    if state.num_qubits != energy.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits but the Hamiltonian has {energy.num_qubits}"
        )


def init_plus(num_qubits: int) -> StateVector:
    """Hadamard on every qubit of ``|0...0>``."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"qubit count must lie in [1, {MAX_QUBITS}], got {num_qubits}")
    size = 1 << num_qubits
    return StateVector(np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128))


def apply_phase(state: StateVector, energy: DiagonalEnergy, gamma: float) -> StateVector:
    """Multiply each amplitude by ``exp(-i gamma E(x))`` in place."""
    _check_sizes(state, energy)
    amp = state.amplitudes
    for start, stop, e in energy.chunks():
        amp[start:stop] *= np.exp(-1j * gamma * e)
    return state


def apply_mixer(state: StateVector, beta: float) -> StateVector:
    """``Rx(2 beta) = exp(-i beta X)`` on every qubit, in place."""
    c, s = np.cos(beta), -1j * np.sin(beta)
    n = state.num_qubits
    for j in range(n):
        view = state.amplitudes.reshape(1 << (n - j - 1), 2, 1 << j)
        lo = view[:, 0, :].copy()
        hi = view[:, 1, :]
        view[:, 0, :] = c * lo + s * hi
        view[:, 1, :] = s * lo + c * hi
    return state


def expectation(state: StateVector, energy: DiagonalEnergy) -> float:
    _check_sizes(state, energy)
    probs = state.probabilities()
    return float(sum(probs[a:b] @ e for a, b, e in energy.chunks()))


def sample(state: StateVector, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` basis indices from the Born distribution."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    probs = state.probabilities()
    probs = probs / probs.sum()
    return rng.choice(probs.size, size=shots, p=probs)
