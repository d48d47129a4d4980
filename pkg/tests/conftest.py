import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from opnorm.spaces import SampleSet, real_line

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def on_line(*values, norm="ell1"):
    """A SampleSet on R from scalar values."""
    return SampleSet(np.array(values, dtype=float).reshape(-1, 1), real_line(norm))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
