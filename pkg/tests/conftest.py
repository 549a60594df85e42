from pathlib import Path

import pytest

from function_model import UNIT_INTERVAL, Interval, load_spec

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run the full-size campaigns")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / f"{name}.json"


@pytest.fixture
def spec():
    """Load a fixture spec by name, e.g. spec("xsq")."""
    return lambda name: load_spec(FIXTURES / f"{name}.json")


@pytest.fixture
def unit():
    return UNIT_INTERVAL


@pytest.fixture
def shifted():
    return Interval(a=0.5, b=3.0)
