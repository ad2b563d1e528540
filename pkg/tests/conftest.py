import pytest

from medevacsim.scenario import load_bundled


@pytest.fixture(scope="session")
def default_scenario():
    return load_bundled()


@pytest.fixture(scope="session")
def replay_scenario():
    return load_bundled("deployment_replay")
