import dataclasses

import numpy as np
import pytest

from meandim.config import config
from meandim.metric.space import FiniteMetricSpace
from meandim.systems.alphabet import AlphabetSpec
from meandim.systems.shift import build_full_shift


@pytest.fixture(autouse=True)
def restore_config():
    """Tests may tighten budgets on the global config; put every knob back afterwards"""
    saved = dataclasses.asdict(config)
    yield
    for name, value in saved.items():
        setattr(config, name, value)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_points():
    return FiniteMetricSpace.from_values([0.0, 1.0], label="pair")


@pytest.fixture
def harmonic_three():
    return FiniteMetricSpace.from_values([1.0, 1 / 2, 1 / 3, 0.0], label="A3")


@pytest.fixture
def binary_shift():
    return build_full_shift(AlphabetSpec.interval(2), W=1)


@pytest.fixture
def make_space():
    """Random finite subsets of the unit square under the sup metric"""

    def build(rng, n, dim=2):
        points = rng.random((n, dim))
        dist = np.abs(points[:, None, :] - points[None, :, :]).max(axis=2)
        return FiniteMetricSpace(tuple(str(i) for i in range(n)), dist, label=f"random-{n}")

    return build
