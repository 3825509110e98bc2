import math

import numpy as np
import pytest

from crpla import harness
from crpla.channel import GridSpec, quantize_map
from crpla.policy import EnergyModel

ACCEPTANCE_LINES = []


def record(criterion: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_map(rng, n1=None, n2=None, levels=None, step=1.0):
    n1 = n1 or int(rng.integers(2, 5))
    n2 = n2 or int(rng.integers(2, max(3, 12 // n1 + 1)))
    grid = GridSpec(n1=n1, n2=n2, step=step, height=10.0)
    eta = rng.uniform(60.0, 100.0, grid.size)
    return quantize_map(grid, eta, levels or int(rng.integers(2, 4)))


def oracle_energy(grid, model, a, b):
    (x0, y0), (x1, y1) = grid.coord(a), grid.coord(b)
    return max(0.0, model.alpha1 * math.hypot(x1 - x0, y1 - y0) / model.velocity - model.alpha0)


@pytest.fixture(scope="session")
def paper_config():
    return harness.config_from_dict({})


@pytest.fixture(scope="session")
def paper_map(paper_config):
    return harness.make_map(paper_config)


@pytest.fixture(scope="session")
def paper_policies(paper_config, paper_map):
    return harness.build_policies(paper_config, paper_map)


@pytest.fixture
def model():
    return EnergyModel()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
