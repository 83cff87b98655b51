import pytest

from rslab.gf import make_field


@pytest.fixture(scope="session")
def gf7():
    return make_field(7)


@pytest.fixture(scope="session")
def gf101():
    return make_field(101)


@pytest.fixture(scope="session")
def gf256():
    return make_field(2, 8)


@pytest.fixture(scope="session")
def gf65536():
    return make_field(2, 16)


@pytest.fixture(scope="session")
def gf65537():
    return make_field(65537)
