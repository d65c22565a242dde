import pytest

from demorgan import hierarchy as hx
from demorgan import matrices as mx


@pytest.fixture(scope="session")
def dm1():
    return mx.catalog("DMm1")


@pytest.fixture(scope="session")
def level_prime2():
    return hx.enumerate_level("prime", 2)


@pytest.fixture(scope="session")
def level_filter1():
    return hx.enumerate_level("filter", 1)


@pytest.fixture(scope="session")
def level_filter2():
    return hx.enumerate_level("filter", 2)
