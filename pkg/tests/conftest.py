import numpy as np
import pytest

from algebra.algebra_zoo import build_pair
from geometry.sasaki_geometry import make_frame
from memory.session_memory import clear_session


@pytest.fixture(scope="session")
def sp1_pair():
    return build_pair("sp:1")


@pytest.fixture(scope="session")
def sp2_pair():
    return build_pair("sp:2")


@pytest.fixture(scope="session")
def su3_pair():
    return build_pair("su:3")


@pytest.fixture(scope="session")
def so7_pair():
    return build_pair("so:7")


@pytest.fixture(scope="session")
def g2_pair():
    return build_pair("g2")


@pytest.fixture(scope="session")
def sp1_frame(sp1_pair):
    return make_frame(sp1_pair)


@pytest.fixture(scope="session")
def sp2_frame(sp2_pair):
    return make_frame(sp2_pair)


@pytest.fixture(scope="session")
def su3_frame(su3_pair):
    return make_frame(su3_pair)


@pytest.fixture(scope="session")
def so7_frame(so7_pair):
    return make_frame(so7_pair)


@pytest.fixture(scope="session")
def g2_frame(g2_pair):
    return make_frame(g2_pair)


@pytest.fixture(params=["sp1_frame", "sp2_frame", "su3_frame", "so7_frame", "g2_frame"])
def any_frame(request):
    return request.getfixturevalue(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(autouse=True)
def fresh_session():
    clear_session()
    yield
    clear_session()
