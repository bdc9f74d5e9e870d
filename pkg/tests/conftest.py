from pathlib import Path

import numpy as np
import pytest

from qhdc.sim import kernels

REPO = Path(__file__).resolve().parents[1]
MNIST = (
    REPO / "data" / "mnist36-images-idx3-ubyte.gz",
    REPO / "data" / "mnist36-labels-idx1-ubyte.gz",
)


@pytest.fixture(params=kernels.available())
def backend(request):
    prev = kernels.BACKEND
    kernels.use(request.param)
    yield request.param
    kernels.use(prev)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def mnist_paths():
    return MNIST if all(p.exists() for p in MNIST) else None


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
