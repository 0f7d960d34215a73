import pytest
from loguru import logger

from mfhj.models.measure import dichotomic, equally_spaced_atoms, uniform


@pytest.fixture(scope="session")
def spin():
    return dichotomic()


@pytest.fixture(scope="session")
def flat():
    """Uniform density on [-1, 1]."""
    return uniform(2.0)


@pytest.fixture(scope="session")
def three_atom():
    """Atoms -1, 0, 1 with equal weights."""
    return equally_spaced_atoms(3, 2.0)


@pytest.fixture(scope="session", params=["dichotomic", "uniform", "three_atom"])
def builtin(request, spin, flat, three_atom):
    return {"dichotomic": spin, "uniform": flat, "three_atom": three_atom}[request.param]


@pytest.fixture(autouse=True)
def silent_logger():
    yield
    logger.remove()
    logger.disable("mfhj")
