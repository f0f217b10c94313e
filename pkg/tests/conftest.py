import pytest

from dgbv.groebner import prepare
from dgbv.model import example


@pytest.fixture(scope="session")
def setups():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = prepare(example(name))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def cubic(setups):
    return setups("cubic")


@pytest.fixture(scope="session")
def quadrics(setups):
    return setups("quadrics")


@pytest.fixture(scope="session")
def quartic(setups):
    return setups("quartic")
