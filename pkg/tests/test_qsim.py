"""Statevector kernel against dense gate-by-gate circuits."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from tcoqaoa import qsim
from tcoqaoa.ising import QuadraticForm, quadratic_value
from tcoqaoa.qaoa import decode


def random_form(rng, n, density=1.0):
    X = np.triu(rng.normal(size=(n, n)) * (rng.random((n, n)) < density), 1)
    return QuadraticForm(X + X.T, rng.normal(size=n), 0.0)


class TestStateVector:
    def test_plus_state_one_qubit(self):
        state = qsim.init_plus(1)
        np.testing.assert_allclose(state.amplitudes, [2 ** -0.5] * 2)

    def test_plus_state_two_qubits(self):
        np.testing.assert_allclose(qsim.init_plus(2).amplitudes, [0.5] * 4)

    @pytest.mark.parametrize("n", [1, 5, 12])
    def test_plus_state_is_normalized(self, n):
        assert abs(qsim.init_plus(n).norm() - 1) <= 1e-12

    @pytest.mark.parametrize("n", [0, qsim.MAX_QUBITS + 1])
    def test_qubit_count_range(self, n):
        with pytest.raises(ValueError):
            qsim.init_plus(n)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            qsim.StateVector(np.ones(3))


class TestDiagonalEnergy:
    def test_table_matches_quadratic_value(self):
        rng = np.random.default_rng(0)
        for n in (1, 4, 9, 12):
            form = random_form(rng, n, 0.5)
            energy = qsim.DiagonalEnergy(form)
            for x in range(1 << n):
                assert energy.table[x] == pytest.approx(
                    quadratic_value(form, decode(x, n), False), abs=1e-12)

    def test_chunked_path_matches_table(self):
        form = random_form(np.random.default_rng(1), 17, 0.3)
        tabled = qsim.DiagonalEnergy(form)
        chunked = qsim.DiagonalEnergy(form, table_cap=0)
        assert chunked.table is None
        parts = np.concatenate([e for _, _, e in chunked.chunks()])
        np.testing.assert_allclose(parts, tabled.table, atol=1e-12)
        assert chunked.energy(12345) == pytest.approx(tabled.energy(12345), abs=1e-12)

    def test_bit_zero_is_spin_minus_one(self):
        form = QuadraticForm(np.zeros((1, 1)), [1.0])
        energy = qsim.DiagonalEnergy(form)
        assert list(energy.table) == [-1.0, 1.0]


class TestPhase:
    def test_zero_angle_is_identity(self):
        form = random_form(np.random.default_rng(2), 3)
        state = qsim.init_plus(3)
        before = state.amplitudes.copy()
        qsim.apply_phase(state, qsim.DiagonalEnergy(form), 0.0)
        np.testing.assert_array_equal(state.amplitudes, before)

    def test_one_qubit_matches_dense_circuit(self):
        y, gamma = -0.064, 0.9
        form = QuadraticForm(np.zeros((1, 1)), [y])
        state = qsim.apply_phase(qsim.init_plus(1), qsim.DiagonalEnergy(form), gamma)
        psi = oracles.on_qubit(oracles.rz(-2 * y * gamma), 0, 1) @ oracles.H_GATE[:, 0]
        psi = oracles.align_global_phase(state.amplitudes, psi)
        np.testing.assert_allclose(state.amplitudes, psi, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.integers(2, 4))
    def test_matches_cnot_rz_circuit(self, seed, gamma, n):
        rng = np.random.default_rng(seed)
        form = random_form(rng, n, 0.7)
        amp = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amp /= np.linalg.norm(amp)
        state = qsim.apply_phase(qsim.StateVector(amp.copy()), qsim.DiagonalEnergy(form), gamma)
        expected = oracles.phase_circuit(form.pairs, form.linear, gamma, n) @ amp
        expected = oracles.align_global_phase(state.amplitudes, expected)
        assert np.max(np.abs(state.amplitudes - expected)) <= 1e-10

    def test_size_mismatch(self):
        form = random_form(np.random.default_rng(3), 2)
        with pytest.raises(ValueError, match="qubits"):
            qsim.apply_phase(qsim.init_plus(3), qsim.DiagonalEnergy(form), 0.1)


class TestMixer:
    def test_zero_angle_is_identity(self):
        state = qsim.StateVector.basis(5, 3)
        qsim.apply_mixer(state, 0.0)
        np.testing.assert_allclose(state.amplitudes, qsim.StateVector.basis(5, 3).amplitudes)

    def test_half_pi_flips_population(self):
        state = qsim.apply_mixer(qsim.StateVector.basis(0, 1), np.pi / 2)
        assert abs(state.amplitudes[1]) == pytest.approx(1.0, abs=1e-12)
        assert state.amplitudes[1] == pytest.approx(-1j, abs=1e-12)

    def test_angles_add(self):
        rng = np.random.default_rng(4)
        amp = rng.normal(size=16) + 1j * rng.normal(size=16)
        amp /= np.linalg.norm(amp)
        two = qsim.apply_mixer(qsim.apply_mixer(qsim.StateVector(amp.copy()), 0.3), 1.1)
        one = qsim.apply_mixer(qsim.StateVector(amp.copy()), 1.4)
        np.testing.assert_allclose(two.amplitudes, one.amplitudes, atol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matches_rx_layer(self, n):
        rng = np.random.default_rng(n)
        amp = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        amp /= np.linalg.norm(amp)
        state = qsim.apply_mixer(qsim.StateVector(amp.copy()), 0.77)
        np.testing.assert_allclose(state.amplitudes, oracles.mixer_circuit(0.77, n) @ amp, atol=1e-12)


class TestExpectationAndSampling:
    def test_uniform_state_has_zero_expectation(self):
        form = random_form(np.random.default_rng(5), 6)
        assert abs(qsim.expectation(qsim.init_plus(6), qsim.DiagonalEnergy(form))) <= 1e-12

    def test_basis_state_gives_its_energy(self):
        form = random_form(np.random.default_rng(6), 4)
        energy = qsim.DiagonalEnergy(form)
        for x in (0, 7, 15):
            assert qsim.expectation(qsim.StateVector.basis(x, 4), energy) == pytest.approx(
                energy.energy(x), abs=1e-12)

    def test_one_qubit_layer_matches_dense_oracle(self):
        y = -0.064
        form = QuadraticForm(np.zeros((1, 1)), [y])
        energy = qsim.DiagonalEnergy(form)
        state = qsim.apply_mixer(qsim.apply_phase(qsim.init_plus(1), energy, 0.3), 0.5)
        expected = oracles.qaoa_expectation_dense({}, [y], 1, [0.3], [0.5])
        assert qsim.expectation(state, energy) == pytest.approx(expected, abs=1e-10)

    def test_basis_state_samples_are_constant(self):
        draws = qsim.sample(qsim.StateVector.basis(6, 3), 100, np.random.default_rng(0))
        assert set(draws) == {6}

    def test_uniform_frequencies(self):
        draws = qsim.sample(qsim.init_plus(2), 40_000, np.random.default_rng(1))
        freq = np.bincount(draws, minlength=4) / 40_000
        np.testing.assert_allclose(freq, 0.25, atol=0.02)

    def test_sampling_is_seeded(self):
        state = qsim.apply_mixer(qsim.init_plus(5), 0.2)
        a = qsim.sample(state, 50, np.random.default_rng(9))
        b = qsim.sample(state, 50, np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)

    def test_sample_mean_converges_to_expectation(self):
        rng = np.random.default_rng(8)
        form = random_form(rng, 4)
        energy = qsim.DiagonalEnergy(form)
        state = qsim.apply_mixer(qsim.apply_phase(qsim.init_plus(4), energy, 0.7), 0.4)
        shots = 20_000
        draws = energy.table[qsim.sample(state, shots, rng)]
        exact = qsim.expectation(state, energy)
        sigma = np.sqrt(state.probabilities() @ (energy.table - exact) ** 2 / shots)
        assert abs(draws.mean() - exact) <= 5 * sigma

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError):
            qsim.sample(qsim.init_plus(1), 0, np.random.default_rng())


def test_norm_survives_many_layers():
    rng = np.random.default_rng(10)
    form = random_form(rng, 8)
    energy = qsim.DiagonalEnergy(form)
    state = qsim.init_plus(8)
    other = qsim.StateVector(rng.normal(size=256) + 1j * rng.normal(size=256))
    other.amplitudes /= np.linalg.norm(other.amplitudes)
    overlap = np.vdot(state.amplitudes, other.amplitudes)
    for _ in range(100):
        g, b = rng.uniform(-np.pi, np.pi, 2)
        for s in (state, other):
            qsim.apply_phase(s, energy, g)
            qsim.apply_mixer(s, b)
    assert abs(state.norm() - 1) <= 1e-10
    assert abs(np.vdot(state.amplitudes, other.amplitudes) - overlap) <= 1e-10
