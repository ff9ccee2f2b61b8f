import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from risnoma.config import default_config
from risnoma.presets import get_preset

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def table1_config():
    """Three-user baseline with the 10 dB eavesdropper."""
    return default_config()


@pytest.fixture(scope="session")
def fig2_config():
    """External-scenario preset with the 0 dB eavesdropper."""
    return get_preset("fig2").config
