import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import DATA  # noqa: E402
from uaprio.io import load_suite  # noqa: E402


@pytest.fixture(scope="session")
def safehome():
    return load_suite(DATA / "safehome.json")


@pytest.fixture(scope="session")
def safehome_path():
    return DATA / "safehome.json"
