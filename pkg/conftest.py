# -*- coding: utf-8 -*-
"""Общие фикстуры тестов."""

import numpy as np
import pytest

from hopfeval.models import SolverConfig

SEED = 2016


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running checks, skipped without --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(SEED))


@pytest.fixture
def tight_cfg():
    """Параметры решателя для сравнения с замкнутыми формулами."""
    return SolverConfig(tol=1e-18, max_iters=200000)
