import sys
from pathlib import Path

import pytest

from cmjlab.rngutil import substream

sys.path.insert(0, str(Path(__file__).parent))

TEST_SEED = 20260809


@pytest.fixture
def rng_for():
    """Factory for named independent streams pinned to the suite seed."""

    def make(*path: int):
        return substream(TEST_SEED, *path)

    return make
