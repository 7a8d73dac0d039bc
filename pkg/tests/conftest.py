import functools

import numpy as np
import pytest

from bethe19.weights import ModelKind, ModelParams

U0, V0 = 0.23 + 0.11j, -0.37 + 0.29j

MODEL_CASES = [
    pytest.param(dict(kind=ModelKind.ZF), id="zf"),
    pytest.param(dict(kind=ModelKind.IK, epsilon=1), id="ik+"),
    pytest.param(dict(kind=ModelKind.IK, epsilon=-1), id="ik-"),
]


@pytest.fixture(params=MODEL_CASES)
def model(request) -> ModelParams:
    return ModelParams(**request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def cplx(rng, shape=None):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@functools.lru_cache(maxsize=None)
def solved(kind: str, n: int, length: int, epsilon: int = 1, seed: int = 0):
    """Root sets from the default multi-start search, cached across tests."""
    from bethe19.solver import RootSearchConfig, multi_start
    p = ModelParams(kind=kind, length=length, epsilon=epsilon)
    return p, tuple(multi_start(p, n, RootSearchConfig(seed=seed)))
