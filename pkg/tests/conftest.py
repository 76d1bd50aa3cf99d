from __future__ import annotations

import numpy as np
import pytest

from paretogof.estimation import LIV_THRESHOLD, bundled_path, load_dataset


@pytest.fixture(scope="session")
def liv():
    return load_dataset(bundled_path("liv_golf_2022"), LIV_THRESHOLD)


@pytest.fixture(scope="session")
def airplane():
    return load_dataset(bundled_path("airplane"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def pareto_rows(rng, rows, n, alpha):
    return (1.0 - rng.random((rows, n))) ** (-1.0 / alpha)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
