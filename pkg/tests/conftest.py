import math
import os
from unittest.mock import patch

import pytest

from config import Config
from oscillator.classical_core import OscillatorParams


@pytest.fixture(autouse=True)
def mock_env_vars():
    """Pin configuration so tests do not depend on the caller's environment"""
    with patch.dict(os.environ, {'DAMPEDQM_LOG_LEVEL': 'WARNING'}), \
            patch.multiple(Config, LOG_LEVEL='WARNING', LOG_FILE='', DEFAULT_HBAR=1.0,
                           VERIFY_SEED=20070123, VERIFY_SAMPLES=100, SWEEP_WORKERS=4):
        yield


@pytest.fixture
def params():
    return OscillatorParams(omega=5.0, gamma=3.0, hbar=1.0)


@pytest.fixture
def undamped():
    return OscillatorParams(omega=1.0, gamma=0.0, hbar=1.0)


@pytest.fixture
def bell_pair():
    return [1 / math.sqrt(2), 1 / math.sqrt(2)]
