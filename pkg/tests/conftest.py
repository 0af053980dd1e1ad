import sys
from pathlib import Path

import numpy as np
import pytest

# Repository root on sys.path for `from src.<package> import ...`
ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))


@pytest.fixture
def rng():
    """Seeded generator for randomized fields."""
    return np.random.default_rng(20240611)
