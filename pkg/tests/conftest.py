import pytest

from gametree import fixtures


@pytest.fixture(scope="session")
def ebos():
    return fixtures.load_game("ebos")


@pytest.fixture(scope="session")
def lrr():
    return fixtures.load_game("lrr")


@pytest.fixture(scope="session")
def surj():
    return fixtures.load_game("surj")


@pytest.fixture(scope="session")
def ebos_pi(ebos):
    return fixtures.load_profile(ebos, "ebos")


@pytest.fixture(scope="session")
def lrr_pi(lrr):
    """The product distribution the behavior profile denotes."""
    return fixtures.load_profile(lrr, "lrr")


@pytest.fixture(scope="session")
def lrr_small(lrr):
    """Same profile, decomposed into a small-support mixture."""
    return fixtures.load_profile(lrr, "lrr", behavior_mode="decompose")


@pytest.fixture(scope="session")
def surj_pi(surj):
    return fixtures.load_profile(surj, "surj")
