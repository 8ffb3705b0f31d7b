"""Linear-model trust-region minimizer."""

import numpy as np
import pytest
from scipy.optimize import minimize as scipy_minimize

from tcoqaoa import optim, qsim
from tcoqaoa.ising import QuadraticForm
from tcoqaoa.qaoa import expectation_function


def run(f, start, budget=100, **kw):
    handle = optim.ObjectiveHandle(len(start), f, budget)
    return optim.minimize(handle, start, **kw), handle


def rosenbrock(x):
    return 100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2


class TestSmoothProblems:
    def test_one_dimensional_parabola(self):
        report, _ = run(lambda x: (x[0] - 2) ** 2, [0.0])
        assert abs(report.best_point[0] - 2) <= 1e-3

    def test_elongated_bowl(self):
        report, _ = run(lambda x: x[0] ** 2 + 10 * x[1] ** 2, [3.0, 3.0])
        assert report.best_value < 1e-4

    def test_converges_before_budget_on_easy_problem(self):
        report, _ = run(lambda x: (x[0] - 2) ** 2, [0.0], budget=500)
        assert report.converged
        assert report.evaluations < 500

    @pytest.mark.parametrize("budget", [200, 2000])
    def test_comparable_to_reference_cobyla(self, budget):
        report, _ = run(rosenbrock, [-1.2, 1.0], budget=budget)
        ref = scipy_minimize(rosenbrock, [-1.2, 1.0], method="COBYLA",
                             options={"rhobeg": 0.5, "tol": 1e-4, "maxiter": budget})
        # same algorithm family and radii: the end points should be close in value
        assert report.best_value <= max(2 * ref.fun, ref.fun + 1e-3)

    def test_one_qubit_qaoa_landscape_against_grid(self):
        form = QuadraticForm(np.zeros((1, 1)), [-0.064])
        f = expectation_function(qsim.DiagonalEnergy(form))
        grid_g = np.linspace(0, 2 * np.pi, 200)
        grid_b = np.linspace(0, np.pi, 200)
        grid_min = min(f(np.array([g, b])) for g in grid_g for b in grid_b)
        report, _ = run(f, [1.0, 0.5])
        assert report.best_value <= grid_min + 1e-3


class TestContract:
    def test_budget_is_respected_exactly(self):
        report, handle = run(rosenbrock, [-1.2, 1.0], budget=37)
        assert report.evaluations == handle.evaluations == 37
        assert len(report.history) == 37

    def test_never_worse_than_start(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            c = rng.normal(size=3)
            f = lambda x: float(np.sin(x @ c) + 0.1 * x @ x)
            start = rng.normal(size=3)
            report, _ = run(f, start, budget=30)
            assert report.best_value <= f(start)

    def test_best_value_matches_best_point(self):
        report, _ = run(rosenbrock, [0.0, 0.0], budget=60)
        assert rosenbrock(report.best_point) == report.best_value

    def test_best_so_far_is_monotone(self):
        report, _ = run(rosenbrock, [-1.2, 1.0], budget=80)
        assert np.all(np.diff(report.best_so_far) <= 0)

    def test_deterministic(self):
        a, _ = run(rosenbrock, [-1.2, 1.0], budget=80)
        b, _ = run(rosenbrock, [-1.2, 1.0], budget=80)
        assert a.history == b.history

    def test_non_finite_value_aborts(self):
        with pytest.raises(FloatingPointError, match="nan"):
            run(lambda x: np.nan if x[0] > 0.2 else x[0], [0.0])

    def test_budget_below_simplex_rejected(self):
        with pytest.raises(ValueError, match="budget"):
            run(rosenbrock, [0.0, 0.0], budget=3)

    def test_arity_mismatch_rejected(self):
        handle = optim.ObjectiveHandle(2, rosenbrock, 50)
        with pytest.raises(ValueError, match="expects 2"):
            optim.minimize(handle, [0.0])
