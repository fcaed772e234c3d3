"""Shared fixtures and random-instance generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from ldpcontract.mechanisms import mix_toward_uniform
from ldpcontract.probability import Channel, ProbVector


def rand_prob(rng: np.random.Generator, dim: int, alpha: float = 1.0) -> ProbVector:
    """Random interior point of the simplex (Dirichlet draw)."""
    return ProbVector(rng.dirichlet(np.full(dim, alpha)))


def rand_channel(rng: np.random.Generator, n_in: int, n_out: int,
                 alpha: float = 1.0) -> Channel:
    """Random row-stochastic matrix with Dirichlet rows."""
    return Channel(rng.dirichlet(np.full(n_out, alpha), size=n_in))


def random_ldp_channel(rng: np.random.Generator, eps: float, n_in: int,
                       n_out: int) -> Channel:
    """Random channel mixed toward uniform until its privacy audit is <= eps."""
    return mix_toward_uniform(rand_channel(rng, n_in, n_out), eps)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260824)
