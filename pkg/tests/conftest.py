import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from nctheta.sampling import random_gaussian, random_phase_point, random_shift, random_structure

settings.register_profile(
    "nctheta",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("nctheta")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Strategies are built on seeds so that every drawn object keeps the
# validity margins guaranteed by nctheta.sampling.
seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.sampled_from([1, 2])


@st.composite
def structures(draw, n=None):
    n = draw(dims) if n is None else n
    return random_structure(np.random.default_rng(draw(seeds)), n)


@st.composite
def structure_and_points(draw, count=2):
    n = draw(dims)
    r = np.random.default_rng(draw(seeds))
    T = random_structure(r, n)
    return (T, *[random_phase_point(r, n, 2.0) for _ in range(count)])


@st.composite
def gaussians(draw, n=None):
    n = draw(dims) if n is None else n
    return random_gaussian(np.random.default_rng(draw(seeds)), n)


@st.composite
def shifts(draw, n):
    return random_shift(np.random.default_rng(draw(seeds)), n)


# One line per acceptance criterion, printed at the end of the run.
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])
