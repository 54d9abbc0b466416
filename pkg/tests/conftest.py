import pytest

from hardyshoot import Problem, find_ustar


@pytest.fixture(scope="session")
def p3():
    return Problem(dim_n=3, radius=1.0, mu=0.125, power=3.0)


@pytest.fixture(scope="session")
def ph():
    return Problem(dim_n=3, radius=1.0, mu=0.125, power=0.5)


@pytest.fixture(scope="session")
def th3(p3):
    # shared threshold computation: several modules probe around u*
    return find_ustar(p3, 1e-6)
