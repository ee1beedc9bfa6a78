import functools

import pytest

from monadlab.monads import generate_newton, generate_slice


@functools.lru_cache(maxsize=None)
def slice_sample(k, seed=0):
    return generate_slice(k, seed)


@functools.lru_cache(maxsize=None)
def newton_sample(k, seed=0):
    return generate_newton(k, seed)


@pytest.fixture(scope="session")
def slice_samples():
    return {k: slice_sample(k) for k in range(1, 6)}
