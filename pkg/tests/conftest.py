"""Shared fixtures: the small .ug graphs under tests/data and the sec6 family."""

from fractions import Fraction
from pathlib import Path

import pytest

from ultrakms.log import configure_logging
from ultrakms.models import Sec6Params
from ultrakms.services.family_sec6 import sec6_mfunction, sec6_weights
from ultrakms.tools.families import build_sec6
from ultrakms.tools.parser import load_ultragraph

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    configure_logging("WARNING")


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def branching():
    """v => u twice, u -> v, N = 2; beta* = 1/2."""
    return load_ultragraph(DATA_DIR / "branching.ug")


@pytest.fixture
def golden():
    return load_ultragraph(DATA_DIR / "golden.ug")


@pytest.fixture
def loop():
    return load_ultragraph(DATA_DIR / "loop.ug")


@pytest.fixture
def fan():
    return load_ultragraph(DATA_DIR / "fan.ug")


@pytest.fixture
def rational():
    """Exact KMS state at beta = 1: m(v) = 4/7, m(u) = 3/7."""
    return load_ultragraph(DATA_DIR / "rational.ug")


@pytest.fixture
def twoloops():
    return load_ultragraph(DATA_DIR / "twoloops.ug")


@pytest.fixture
def sec6_params():
    return Sec6Params(d=2, a=2, beta=2, m_w=Fraction(1, 2))


@pytest.fixture
def sec6_graph(sec6_params):
    return build_sec6(sec6_params, depth=32)


@pytest.fixture
def sec6_m(sec6_params, sec6_graph):
    return sec6_mfunction(sec6_params, graph=sec6_graph)


@pytest.fixture
def sec6_M(sec6_params, sec6_graph):
    return sec6_weights(sec6_graph, sec6_params)
