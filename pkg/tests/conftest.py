import pytest

from lamtest.kmodel import builtin


@pytest.fixture(scope="session")
def dinf():
    return builtin("dinf")


@pytest.fixture(scope="session")
def park():
    return builtin("park")


@pytest.fixture(scope="session")
def norm():
    return builtin("norm")


@pytest.fixture(scope="session")
def strat():
    return builtin("strat")


@pytest.fixture(scope="session")
def zed():
    return builtin("zed", size=6)


@pytest.fixture(scope="session")
def omega():
    return builtin("omega", size=6)
