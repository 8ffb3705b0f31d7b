import numpy as np
import pytest
from hypothesis import strategies as st

from tcoqaoa.ising import expand, make_spec

RUNNING_RATES = [0.5, 0.7, 0.8]
RUNNING_TIMES = [3, 6, 1]


@pytest.fixture
def running_spec():
    """Three test cases with failure rate and execution time, plus suite size."""
    return make_spec([RUNNING_RATES], [RUNNING_TIMES], minimize_size=True)


@pytest.fixture
def running_form(running_spec):
    return expand(running_spec)


def random_spec(rng: np.random.Generator, n: int, minimize_size: bool | None = None):
    s = int(rng.integers(1, 3))
    q = int(rng.integers(0, 3))
    if minimize_size is None:
        minimize_size = bool(rng.integers(2))
    eff = [rng.uniform(0, 1, n) + (rng.random(n) < 0.8) * 1e-3 for _ in range(s)]
    cost = [np.exp(rng.uniform(np.log(0.1), np.log(100), n)) for _ in range(q)]
    m = s + q + int(minimize_size)
    weights = rng.uniform(0.1, 1.0, m)
    return make_spec(eff, cost, weights=weights, minimize_size=minimize_size)


@st.composite
def specs(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_spec(np.random.default_rng(seed), n)


@st.composite
def spin_vectors(draw, n):
    return np.array(draw(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n)))


# --- acceptance summary -------------------------------------------------------------

_verdicts: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if not item.name.startswith("test_criterion_"):
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = dict(item.user_properties).get("detail", "")
        if not detail and rep.failed:
            detail = f"error: {call.excinfo.typename}: {call.excinfo.value}"
        _verdicts[item.name] = ("PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_verdicts):
        verdict, detail = _verdicts[name]
        number = int(name.split("_")[2])
        label = name.split("_", 3)[3].replace("_", " ")
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {label}: {detail}")
