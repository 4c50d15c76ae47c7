import sys
from pathlib import Path

import pytest

from edgesim.hardware import canonical_suite

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def suite():
    return canonical_suite()
