import numpy as np
import pytest
import structlog


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator shared by randomized tests."""
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def _reset_structlog():
    """Drop logging configured by a CLI run so it cannot outlive the captured stream."""
    yield
    structlog.reset_defaults()
