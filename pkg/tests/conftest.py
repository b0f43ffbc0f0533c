import numpy as np
import pytest

from _games import BALANCED, game_from_receivers
from tokex.core import cumulative_counts
from tokex.simulate import SeedSpec, draw_receivers

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def null_game():
    r = draw_receivers(BALANCED.n_players, BALANCED.n_rounds, SeedSpec(2024, 0))
    return game_from_receivers(BALANCED, r)


@pytest.fixture
def null_counts(null_game):
    return cumulative_counts(null_game)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
