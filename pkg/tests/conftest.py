import sys

import numpy as np
import pytest

from binperc.generate import GenConfig, sample_instance
from binperc.model import Instance, ModelKind
from binperc.schedule import custom_schedule

# block sizes n_0..n_R with every prefix length odd, so no consulted row sum can be 0
TINY_BLOCKS = (5, 4, 2, 2)
TINY_BUDGETS = (5, 3, 1)


def tiny_instance(model, kappa, seed, n=13, m=5):
    return sample_instance(GenConfig(ModelKind.parse(model), n, m / n, kappa, seed), m=m)


def tiny_schedule(model, kappa, m=5, blocks=TINY_BLOCKS, budgets=TINY_BUDGETS):
    return custom_schedule(model, kappa, blocks, budgets, m)


def make_instance(model, kappa, rows):
    return Instance(ModelKind.parse(model), kappa, np.array(rows, dtype=np.int8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
