import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fkdv.spectral import Field, make_grid

settings.register_profile("fkdv", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fkdv")


def random_field(grid, seed=0, mean_zero=False):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(grid.shape)
    if mean_zero:
        vals -= vals.mean()
    return Field.from_values(grid, vals)


def smooth_field(grid, seed=0, modes=6, mean_zero=False):
    """Random trigonometric polynomial well below the dealiasing cutoff."""
    rng = np.random.default_rng(seed)
    L = grid.half_length
    vals = np.zeros(grid.shape)
    start = 1 if mean_zero else 0
    for m in range(start, modes):
        for x in grid.coords:
            vals += rng.standard_normal() * np.cos(np.pi * m * x / L + rng.uniform(0, 2 * np.pi))
    return Field.from_values(grid, vals)


@pytest.fixture
def pi_grid():
    return make_grid(1, 64, np.pi)


# acceptance summary: one line per criterion, with the measured numbers

_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Attach measured values to the current acceptance test."""
    details = []
    _CRITERIA[request.node.nodeid] = {"details": details, "outcome": "not run"}
    return details


def pytest_runtest_logreport(report):
    entry = _CRITERIA.get(report.nodeid)
    if entry is None:
        return
    if report.when == "call" or report.failed:
        entry["outcome"] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, entry in _CRITERIA.items():
        name = nodeid.split("::")[-1].removeprefix("test_")
        line = f"{entry['outcome']:4s}  {name}"
        if entry["details"]:
            line += "  [" + "; ".join(entry["details"]) + "]"
        terminalreporter.write_line(line)
