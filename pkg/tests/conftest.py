import pytest

from weylnichols.pipeline import get_context


@pytest.fixture(scope="session")
def g2():
    return get_context("G2")


@pytest.fixture(scope="session")
def f4():
    return get_context("F4")


@pytest.fixture(scope="session")
def e6():
    return get_context("E6")
