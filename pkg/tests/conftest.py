"""Shared fixtures and the acceptance-summary terminal hook."""

from types import SimpleNamespace

import numpy as np
import pytest

import helpers
from atmtomo import assemble_operator, true_profile


@pytest.fixture(scope="session")
def desk():
    """Small fully determined reconstruction problem shared across test files."""
    grid = helpers.desk_grid()
    network = helpers.desk_network(grid)
    op = assemble_operator(network, 8)
    truth = true_profile(grid)
    return SimpleNamespace(
        grid=grid,
        network=network,
        op=op,
        truth=truth,
        f_true=op.apply(truth.values),
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if helpers._criteria_lines:
        terminalreporter.section("acceptance criteria")
        for line in helpers._criteria_lines:
            terminalreporter.write_line(line)
