import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from spinlab.forms import Form, basis_tuples

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

coeff = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)


@st.composite
def forms(draw, dim, degree):
    idx = basis_tuples(dim, degree)
    vals = draw(st.lists(coeff, min_size=len(idx), max_size=len(idx)))
    return Form(dim, dict(zip(idx, vals)), degree=degree)


@st.composite
def unit_vectors(draw, n):
    v = np.array(draw(st.lists(coeff, min_size=n, max_size=n)))
    if np.linalg.norm(v) < 1e-3:
        v = np.eye(n)[0]
    return v / np.linalg.norm(v)


seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
