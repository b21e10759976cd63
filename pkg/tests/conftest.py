import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from kstoolkit import enumerate_measurements, fixture_cabello18


@pytest.fixture(scope="session")
def cabello18():
    return fixture_cabello18()


@pytest.fixture(scope="session")
def cabello_cover(cabello18):
    return enumerate_measurements(cabello18)
