import pytest

from epshyp.construction import SearchConfig, assemble_families, random_dyadic_targets
from epshyp.criterion import build_vector, make_rolewicz, block_shift_instance
from epshyp.weights import Params

ACCEPT = Params(0.3, 2.0, 3)


@pytest.fixture(scope="session")
def params():
    return ACCEPT


@pytest.fixture(scope="session")
def small_construction():
    """Blocks 1..8 chosen by the search, no anchors."""
    return assemble_families(8, ACCEPT, SearchConfig())


@pytest.fixture(scope="session")
def op4(small_construction):
    return small_construction.operator


@pytest.fixture(scope="session")
def targets20():
    return random_dyadic_targets(20, seed=0)


@pytest.fixture(scope="session")
def main_construction(targets20):
    return assemble_families(3 * len(targets20) + 1, ACCEPT, anchors=targets20 * 3)


@pytest.fixture(scope="session")
def main_certificate(main_construction, targets20):
    return build_vector(block_shift_instance(main_construction), targets20)


@pytest.fixture(scope="session")
def rolewicz():
    return make_rolewicz(2.0, 2.0)
