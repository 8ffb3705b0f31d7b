"""Test case optimization as an Ising problem, solved with simulated QAOA.

Large suites are decomposed into small sub-problems around the variables whose
flip would most reduce the fitness; each sub-problem runs on a statevector
QAOA simulator.
"""

from .ising import ProblemSpec, QuadraticForm, evaluate_direct, expand, make_spec, quadratic_value
from .loch import LochConfig, solve
from .qaoa import QaoaConfig, run_qaoa

__all__ = [
    "LochConfig", "ProblemSpec", "QaoaConfig", "QuadraticForm", "evaluate_direct", "expand",
    "make_spec", "quadratic_value", "run_qaoa", "solve",
]
__version__ = "0.1.0"
