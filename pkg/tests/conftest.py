import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
sys.path.insert(0, str(HERE))

from fpl.core import Atom, DiagonalStdCov, PiecewiseLinearFn, Trajectory  # noqa: E402
from fpl.dsl import parse_atoms, parse_formula, parse_trajectory  # noqa: E402


def drift_atom(horizon=3.0, name="p1"):
    """Mean (t, t/3), std_x = 1/4, std_y = 1/2 - t/12."""
    mean = (PiecewiseLinearFn.linear(0, 1, 0, horizon), PiecewiseLinearFn.linear(0, 1 / 3, 0, horizon))
    std = (PiecewiseLinearFn.constant(0.25, 0, horizon), PiecewiseLinearFn.linear(0.5, -1 / 12, 0, horizon))
    return Atom(name, horizon, mean, DiagonalStdCov(std))


def line_traj(horizon, y=-1.0):
    """(t, y) on [0, horizon]."""
    return Trajectory([0.0, horizon], [[0.0, y], [horizon, y]])


def load_fixture(stem):
    catalog = parse_atoms((FIXTURES / f"{stem}_atoms.json").read_text())
    f = parse_formula((FIXTURES / f"{stem}.fpl").read_text(), catalog)
    return catalog, f


def load_traj(name):
    return parse_trajectory((FIXTURES / name).read_text())


@pytest.fixture
def drift():
    return drift_atom()


@pytest.fixture
def handover():
    """Two-atom until formula, the off-track trajectory and the mean follower."""
    catalog, f = load_fixture("handover")
    return catalog, f, load_traj("handover_traj.csv"), load_traj("handover_mean.csv")


# One line per acceptance criterion, shown at the end of the run.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
