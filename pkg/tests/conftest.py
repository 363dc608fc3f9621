import numpy as np
import pytest
import hypothesis.strategies as st

from uniformgeom import FiniteMetricSpace


def line(*xs):
    return FiniteMetricSpace.from_points(np.asarray(xs, dtype=float))


@pytest.fixture
def line5():
    return line(0, 1, 2, 3, 4)


@pytest.fixture
def half_line():
    return line(0.0, 0.5, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


# integer grid points: distinct by construction, and exact ties at eps are common
grid_points = st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=1, max_size=12, unique=True
)
scales = st.sampled_from([0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.5, 7.0])


def space_of(points):
    return FiniteMetricSpace.from_points(np.asarray(points, dtype=float))


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for text in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(text)
