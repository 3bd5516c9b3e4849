import pytest

from rieszkit import QuadratureScheme, dyadic_ball_family

STD_CENTERS_1D = [[0.0], [0.5], [-0.5], [1.0], [-1.0], [2.0], [-2.0]]


@pytest.fixture(scope="session")
def std_family():
    """Dyadic ball family around the usual singular centers on the line."""
    return dyadic_ball_family(STD_CENTERS_1D, -8, 4)


@pytest.fixture(scope="session")
def small_family():
    return dyadic_ball_family([[0.0], [1.0], [-1.0]], -6, 2)


@pytest.fixture(scope="session")
def fast_scheme():
    """Cheaper 1-d scheme for unit tests that do many integrals."""
    return QuadratureScheme(resolution=128, tol=1e-5)
