import os

import pytest

from yrun import presets

# Long runs (the full classification) are opt in.
SLOW = os.getenv("YSYS_SLOW") == "1"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long running checks, enabled with YSYS_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if SLOW:
        return
    skip = pytest.mark.skip(reason="set YSYS_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def row1():
    return presets.FINITE_TYPE["1"]


@pytest.fixture
def broken():
    """
    Row 2 without its A- off-diagonal: a valid datum that is not symplectic.
    """
    return presets._pair(
        plus=[[{0: 1, 2: 1}, {1: -1}], [{1: -1, 5: -1}, {0: 1, 6: 1}]],
        minus=[[{0: 1, 2: 1}, 0], [0, {0: 1, 6: 1}]],
    )
