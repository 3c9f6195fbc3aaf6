import pytest

from xfcm import default_scenarios, synthesize_population


@pytest.fixture(scope="session")
def scenarios():
    return default_scenarios()


@pytest.fixture(scope="session")
def small_population(scenarios):
    # three quantized participants, enough to drive fit/evaluate paths quickly
    return synthesize_population(3, scenarios, seed=5)
