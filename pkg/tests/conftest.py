"""Shared fixtures and hypothesis profiles"""
import os
import sys
from pathlib import Path

import hypothesis
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.geometry import ThreadSystem, build_net, build_threads, place_endpoints  # noqa: E402
from src.geometry.sphere import random_sphere_points  # noqa: E402
from src.metric import build_metric  # noqa: E402

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=25, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full convergence suite runs")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def net_05():
    return build_net(2, 0.5, 0)


@pytest.fixture(scope="session")
def threads_05(net_05):
    return build_threads(place_endpoints(net_05))


@pytest.fixture(scope="session")
def metric_05(threads_05):
    return build_metric(threads_05)


def random_system(k: int, seed: int, m: int = 2) -> ThreadSystem:
    """k threads between independent uniform endpoint pairs"""
    gen = np.random.default_rng(seed)
    a = random_sphere_points(m, k, gen)
    b = random_sphere_points(m, k, gen)
    return ThreadSystem.from_segments(list(zip(a, b)), eps=0.5, rho=0.01)


@pytest.fixture
def make_system():
    return random_system
