import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def seed():
    """Base seed for randomized tests; BRANCHSAT_SEED overrides the default."""
    return int(os.environ.get("BRANCHSAT_SEED", "0"))
