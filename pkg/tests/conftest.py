import pytest

from lockstep import painleve as pl


@pytest.fixture(scope="session")
def sol():
    return pl.default_solution()


@pytest.fixture(scope="session")
def table(sol):
    return pl.f1_table(sol)
