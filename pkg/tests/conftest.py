import numpy as np
import pytest

from protcascade.knowledge import Warehouse, build_knowledge
from protcascade.synthetic import synthetic_draws, synthetic_warehouse

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_synth():
    """5 families x 40 rows; enough for every phase without slowing the suite."""
    wh = synthetic_warehouse(5, 40, seed=7)
    return wh, build_knowledge(wh)


@pytest.fixture(scope="session")
def small_draws():
    return synthetic_draws(5, 60, seed=7)


def make_warehouse(rows):
    wh = Warehouse()
    for fam, feats in rows:
        wh.append(fam, np.asarray(feats, dtype=float))
    return wh


@pytest.fixture(scope="session")
def full_synth():
    """The acceptance-size corpus: 5 families x 500 rows, seed 1."""
    wh = synthetic_warehouse(5, 500, seed=1)
    return wh, build_knowledge(wh)
