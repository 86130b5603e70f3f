import numpy as np
import pytest

from svmsoc import TestInstance, TrainedModel


def random_model(rng: np.random.Generator, sv_count: int, feature_count: int, scale=1.0):
    sv = (rng.uniform(-scale, scale, (sv_count, feature_count))).astype(np.float32)
    ay = rng.uniform(-scale, scale, sv_count).astype(np.float32)
    bias = float(np.float32(rng.uniform(-scale, scale)))
    return TrainedModel(sv, ay, bias)


def random_instance(rng: np.random.Generator, feature_count: int, scale=1.0):
    return TestInstance(rng.uniform(-scale, scale, feature_count).astype(np.float32))


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
