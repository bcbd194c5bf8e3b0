import pytest

from nablaops.group_operads import SymmetricOperad, TrivialOperad


@pytest.fixture(scope="session")
def S():
    return SymmetricOperad(6)


@pytest.fixture(scope="session")
def T():
    return TrivialOperad(6)
