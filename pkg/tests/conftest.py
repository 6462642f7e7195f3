"""
conftest.py
Shared fixtures: the packaged scenario files.
"""
import os

import pytest
from hypothesis import settings

import splitkit
from splitkit.scenario import load_scenario

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(splitkit.__file__)), "fixtures")
FIXTURE_NAMES = ("loop_placement", "edge_placement", "star", "chain")

settings.register_profile("splitkit", derandomize=True, deadline=None)
settings.load_profile("splitkit")


@pytest.fixture(scope="session")
def fixture_path():
    def _path(name: str) -> str:
        return os.path.join(FIXTURE_DIR, f"{name}.json")
    return _path


@pytest.fixture(scope="session")
def scenarios():
    return {name: load_scenario(os.path.join(FIXTURE_DIR, f"{name}.json")) for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def loop_placement(scenarios):
    return scenarios["loop_placement"]


@pytest.fixture(scope="session")
def edge_placement(scenarios):
    return scenarios["edge_placement"]


@pytest.fixture(scope="session")
def star(scenarios):
    return scenarios["star"]


@pytest.fixture(scope="session")
def chain(scenarios):
    return scenarios["chain"]


@pytest.fixture(params=FIXTURE_NAMES)
def any_scenario(request, scenarios):
    return scenarios[request.param]
