import pytest

from fforge import build_dodecahedron
from fforge.engine import EnumerationJob, enumerate_closure, oracle_generate
from fforge.growth import Regime

import helpers


@pytest.fixture(scope="session")
def dodeca():
    return build_dodecahedron()


@pytest.fixture(scope="session")
def oracle5():
    return oracle_generate(5)


@pytest.fixture(scope="session")
def gen_seven():
    return enumerate_closure(EnumerationJob(Regime.SEVEN, 5, collect_traces=True))


@pytest.fixture(scope="session")
def gen_a():
    return enumerate_closure(EnumerationJob(Regime.A_OPS, 5, collect_traces=True))


@pytest.fixture(scope="session")
def gen_ab():
    return enumerate_closure(EnumerationJob(Regime.AB_OPS, 5, collect_traces=True))


@pytest.fixture(scope="session")
def c60():
    return helpers.ipr_c60()


@pytest.fixture(scope="session")
def family_maps(gen_seven):
    """Canonical maps of every class reached by the truncation closure."""
    return [e.map for e in gen_seven.entries.values()]
