"""Independent reference implementations used only by the tests.

Nothing here imports the solver code paths it is used to check: the gate
simulator builds dense matrices from single-gate definitions, the fitness
oracle uses exact rational arithmetic, and the rank-test oracle enumerates
every relabelling of the pooled sample.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

# --- exact fitness --------------------------------------------------------------


def fitness_fraction(effectiveness, cost, weights, z) -> Fraction:
    """Weighted sum of squared normalized objectives in exact rationals.

    ``z[i] == -1`` selects test case ``i``.  Effectiveness objectives count the
    attribute mass left out, cost objectives the mass selected.
    """
    groups = [("e", col) for col in effectiveness] + [("c", col) for col in cost]
    total_w = sum(Fraction(w) for w in weights)
    out = Fraction(0)
    for (kind, col), w in zip(groups, weights):
        col = [Fraction(v) for v in col]
        mass = sum(col)
        if kind == "e":
            f = sum(v for v, s in zip(col, z) if s == 1) / mass
        else:
            f = sum(v for v, s in zip(col, z) if s == -1) / mass
        out += Fraction(w) / total_w * f * f
    return out


def all_spins(n: int):
    return [np.array(z) for z in itertools.product((-1, 1), repeat=n)]


# --- gate-level circuit simulator -------------------------------------------------

H_GATE = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def on_qubit(gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Embed a one-qubit gate; qubit ``j`` is bit ``j`` of the basis index."""
    out = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        out = np.kron(out, gate if q == qubit else np.eye(2))
    return out


def cnot(control: int, target: int, n: int) -> np.ndarray:
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        y = x ^ (1 << target) if (x >> control) & 1 else x
        m[y, x] = 1
    return m


def phase_circuit(pairs: dict, linear, gamma: float, n: int) -> np.ndarray:
    """Problem unitary built gate by gate.

    Pair terms use CNOT, Rz(2 X gamma), CNOT.  Linear terms use
    Rz(-2 Y gamma): with bit 0 read as spin -1 the spin operator is -Z.
    """
    u = np.eye(1 << n, dtype=complex)
    for (j, k), x in pairs.items():
        u = cnot(j, k, n) @ on_qubit(rz(2 * x * gamma), k, n) @ cnot(j, k, n) @ u
    for j, y in enumerate(linear):
        if y != 0:
            u = on_qubit(rz(-2 * y * gamma), j, n) @ u
    return u


def mixer_circuit(beta: float, n: int) -> np.ndarray:
    u = np.eye(1 << n, dtype=complex)
    for j in range(n):
        u = on_qubit(rx(2 * beta), j, n) @ u
    return u


def hadamard_layer(n: int) -> np.ndarray:
    u = np.eye(1 << n, dtype=complex)
    for j in range(n):
        u = on_qubit(H_GATE, j, n) @ u
    return u


def spin_hamiltonian(pairs: dict, linear, n: int) -> np.ndarray:
    """Dense diagonal Hamiltonian with spin_j = -Z_j (bit 0 -> -1)."""
    z_ops = [-on_qubit(np.diag([1.0, -1.0]).astype(complex), j, n) for j in range(n)]
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for (j, k), x in pairs.items():
        h += x * z_ops[j] @ z_ops[k]
    for j, y in enumerate(linear):
        h += y * z_ops[j]
    return h


def qaoa_expectation_dense(pairs: dict, linear, n: int, gammas, betas) -> float:
    psi = hadamard_layer(n)[:, 0]
    for g, b in zip(gammas, betas):
        psi = mixer_circuit(b, n) @ (phase_circuit(pairs, linear, g, n) @ psi)
    h = spin_hamiltonian(pairs, linear, n)
    return float(np.real(np.conj(psi) @ h @ psi))


def align_global_phase(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rotate ``b`` by the global phase that best matches ``a``."""
    overlap = np.vdot(b, a)
    return b * (overlap / abs(overlap)) if abs(overlap) > 0 else b


# --- rank tests ------------------------------------------------------------------


def _midranks(values: np.ndarray) -> np.ndarray:
    out = np.empty(values.size)
    for i, v in enumerate(values):
        out[i] = np.sum(values < v) + (np.sum(values == v) + 1) / 2
    return out


def exact_mwu_p(a, b) -> float:
    """Two-sided permutation p of the rank-sum statistic, by full enumeration.

    Every split of the pooled sample into groups of the original sizes is
    equally likely under the null; ties keep their mid-ranks.
    """
    a, b = np.asarray(a, float), np.asarray(b, float)
    pooled = np.concatenate([a, b])
    ranks = _midranks(pooled)
    m = a.size
    splits = np.array(list(itertools.combinations(range(pooled.size), m)))
    u_all = ranks[splits].sum(axis=1) - m * (m + 1) / 2
    u_obs = ranks[:m].sum() - m * (m + 1) / 2
    tol = 1e-9
    lower = np.mean(u_all <= u_obs + tol)
    upper = np.mean(u_all >= u_obs - tol)
    return min(1.0, 2 * min(lower, upper))


def exact_mwu_p_no_ties(m: int, n: int, u_obs: float) -> float:
    """Exact two-sided p for tie-free samples from the U recurrence.

    ``count[m][n][u]`` is the number of arrangements with statistic ``u``;
    placing the largest value in either sample gives the recurrence.
    """
    table = {}

    def counts(i, j):
        if (i, j) in table:
            return table[(i, j)]
        if i == 0 or j == 0:
            res = np.zeros(1, dtype=object)
            res[0] = 1
        else:
            with_a = np.concatenate([np.zeros(j, dtype=object), counts(i - 1, j)])
            with_b = counts(i, j - 1)
            size = max(with_a.size, with_b.size)
            res = np.zeros(size, dtype=object)
            res[:with_a.size] += with_a
            res[:with_b.size] += with_b
        table[(i, j)] = res
        return res

    c = counts(m, n)
    total = sum(c)
    u = np.arange(c.size)
    lower = sum(c[u <= u_obs + 1e-9])
    upper = sum(c[u >= u_obs - 1e-9])
    return min(1.0, float(2 * min(lower, upper) / total))


def permutation_kw_p(groups, statistic, permutations: int, rng) -> float:
    """Monte Carlo permutation p-value for a k-sample statistic."""
    sizes = [len(g) for g in groups]
    pooled = np.concatenate([np.asarray(g, float) for g in groups])
    observed = statistic(*groups)
    cuts = np.cumsum(sizes)[:-1]
    hits = 0
    for _ in range(permutations):
        perm = rng.permutation(pooled)
        if statistic(*np.split(perm, cuts)) >= observed - 1e-12:
            hits += 1
    return (hits + 1) / (permutations + 1)
