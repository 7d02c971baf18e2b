import pytest

from skrw.discovery import discover
from skrw.realization import SklyaninParams, realize

DIAGONAL = SklyaninParams.of(1, 0, 1, 0, 0, 1)


@pytest.fixture(scope="session")
def diagonal_real():
    return realize(DIAGONAL)


@pytest.fixture(scope="session")
def diagonal_run(diagonal_real):
    # full pipeline once per session; most discovery tests share it
    return discover(diagonal_real)
