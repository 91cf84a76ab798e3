import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "resmex",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("resmex")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=4)


@pytest.fixture
def ket0():
    return np.diag([1.0, 0.0]).astype(complex)


@pytest.fixture
def ket1():
    return np.diag([0.0, 1.0]).astype(complex)


@pytest.fixture
def mixed():
    return np.eye(2, dtype=complex) / 2
