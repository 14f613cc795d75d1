import os

import numpy as np
import pytest
from loguru import logger

from bessel_subord.series.models import DiskGrid, TruncatedSeries
from bessel_subord.subordination.service import function_family


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch):
    """Keep BESSEL_SUBORD_* variables from the developer's shell out of the tests."""
    for key in list(os.environ):
        if key.upper().startswith("BESSEL_SUBORD_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture
def small_grid() -> DiskGrid:
    return DiskGrid(radii=(0.5, 0.9, 0.999), angular_samples=512)


@pytest.fixture
def default_grid() -> DiskGrid:
    return DiskGrid.default()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def family() -> list[tuple[str, TruncatedSeries]]:
    return function_family(seed=20240611, size=5, version="v1", order=32)


@pytest.fixture
def log_messages():
    """Capture loguru records at WARNING and above."""
    messages: list[str] = []
    handler_id = logger.add(lambda msg: messages.append(msg.record["message"]), level="WARNING")
    yield messages
    logger.remove(handler_id)
