"""Shared fixtures."""
from typing import Callable

import numpy as np
import pytest

from sieeopt.model.system import SystemParams

ParamsFactory = Callable[..., SystemParams]


def make_random_params(rng: np.random.Generator, n_bs: int, cross_max: float = 0.2) -> SystemParams:
    """Unit-scale instance with strong direct links and weak cross links."""
    gains = rng.uniform(0.01, cross_max, size=(n_bs, n_bs))
    np.fill_diagonal(gains, rng.uniform(1.0, 10.0, size=n_bs))
    return SystemParams(
        gains=gains,
        phi=rng.uniform(0.5, 2.0, size=n_bs),
        circuit_power=rng.uniform(0.1, 1.0, size=n_bs),
        p_max=rng.uniform(0.5, 2.0, size=n_bs),
        noise_power=0.1,
    )


@pytest.fixture
def random_params() -> ParamsFactory:
    """Factory for seeded random instances: random_params(seed, n_bs)."""
    def factory(seed: int, n_bs: int, cross_max: float = 0.2) -> SystemParams:
        return make_random_params(np.random.default_rng(seed), n_bs, cross_max)
    return factory
