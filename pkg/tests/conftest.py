import json
import os
from pathlib import Path

import pytest

from onetwo.lattice import build_torus

GOLDEN_DIR = Path(__file__).parent / "golden"


def load_golden(name):
    with open(GOLDEN_DIR / name) as fh:
        return json.load(fh)


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: long-running check, enabled with ONETWO_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("ONETWO_SLOW"):
        return
    skip = pytest.mark.skip(reason="slow; set ONETWO_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def L2():
    return build_torus(2)


@pytest.fixture(scope="session")
def L3():
    return build_torus(3)
