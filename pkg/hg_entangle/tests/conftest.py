"""Pytest configuration for hg-entangle tests."""

import os
from unittest.mock import patch

import numpy as np
import pytest

from hg_entangle.models.config import HGEntangleConfig
from hg_entangle.models.quadrature import QuadratureSpec


@pytest.fixture(scope="session", autouse=True)
def pinned_env():
    """Keep library defaults independent of the caller's environment."""
    overrides = {"LOG_LEVEL": "WARNING"}
    cleared = [key for key in os.environ if key.upper().startswith("HG_ENTANGLE_")]
    with patch.dict(os.environ, overrides):
        for key in cleared:
            del os.environ[key]
        yield


@pytest.fixture
def settings():
    """Library defaults."""
    return HGEntangleConfig()


@pytest.fixture
def spec():
    """Default 64-node quadrature."""
    return QuadratureSpec()


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)
