import numpy as np
import pytest

from degch.model import ModelParams, Potential
from degch.spectral import PeriodicField, PeriodicGrid


@pytest.fixture
def grid2():
    return PeriodicGrid(2, 32)


@pytest.fixture
def grid1():
    return PeriodicGrid(1, 64)


def smooth_random(grid, seed=0, kmax=4, amp=0.3):
    """Band-limited random field with modes |k_i| <= kmax."""
    rng = np.random.default_rng(seed)
    coords = grid.coords()
    v = np.zeros(grid.shape)
    for _ in range(6):
        k = rng.integers(-kmax, kmax + 1, size=grid.dim)
        ph = rng.uniform(0, 2 * np.pi)
        v += rng.normal() * np.cos(sum(ki * c for ki, c in zip(k, coords)) + ph)
    return PeriodicField(grid, amp * v / max(1.0, np.max(np.abs(v))))


@pytest.fixture
def scaled_params():
    return ModelParams(epsilon=0.1, theta=0.05, potential=Potential("scaled_quartic"))


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one summary line per acceptance criterion."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
