"""Shared fixtures for the ucover test suite."""

import numpy as np
import pytest

from ucover.config import get_settings
from ucover.core import ExplicitStream, SampleStream, UniformSubtorus, UniformTorus


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Drop cached settings so UCOVER_* overrides apply per test."""
    for name in (
        "UCOVER_THREADS",
        "UCOVER_MAX_GRID_BITS",
        "UCOVER_MAX_GRID_BYTES",
        "UCOVER_CHUNK_SIZE",
        "UCOVER_OUTPUT_DIR",
    ):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def torus1():
    return UniformTorus(d=1)


@pytest.fixture
def torus2():
    return UniformTorus(d=2)


@pytest.fixture
def slab():
    """Uniform measure on the circle {x_2 = 0} inside T^2."""
    return UniformSubtorus(d=2, d_support=1)


@pytest.fixture
def stream1(torus1):
    return SampleStream(1, torus1)


@pytest.fixture
def forced_stream():
    """omega_1 = 0.1, omega_2 = 0.6 on the circle."""
    return ExplicitStream(np.array([0.1, 0.6]))


@pytest.fixture
def small_chunks(monkeypatch):
    """Force tiny streaming blocks so chunk boundaries get exercised."""
    monkeypatch.setenv("UCOVER_CHUNK_SIZE", "64")
    get_settings.cache_clear()
    yield 64
    get_settings.cache_clear()
