import pytest

from logcascade.contfrac import alpha_star_table, golden_table
from logcascade.observable import make_paper_phi, make_symmetric_phi


@pytest.fixture(scope="session")
def table():
    """Depth-8 table of the canonical quadratic test number."""
    return alpha_star_table(8)


@pytest.fixture(scope="session")
def golden():
    return golden_table(40)


@pytest.fixture(scope="session")
def paper_phi():
    return make_paper_phi()


@pytest.fixture(scope="session")
def symmetric_phi():
    return make_symmetric_phi()
