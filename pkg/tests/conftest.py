import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ncx.models import build
from ncx.scalar import Scalar

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "ncx",
    deadline=None,
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ncx")

PAIRS = [(0, 1), (0, 2), (1, 2)]


@st.composite
def scalars(draw, pairs=PAIRS, max_terms=3):
    out = Scalar(0)
    for _ in range(draw(st.integers(0, max_terms))):
        re_ = draw(st.integers(-5, 5))
        im_ = draw(st.integers(-5, 5))
        ph = [(pr, draw(st.integers(-2, 2))) for pr in pairs]
        out = out + Scalar.monomial(complex(re_, im_), ph)
    return out


@st.composite
def rng_seeds(draw):
    return np.random.default_rng(draw(st.integers(0, 2**32 - 1)))


_MODELS = {}


def model(kind, n):
    key = (kind, n)
    if key not in _MODELS:
        _MODELS[key] = build(kind, n)
    return _MODELS[key]


@pytest.fixture
def plane1():
    return model("theta_plane", 1)


@pytest.fixture
def plane2():
    return model("theta_plane", 2)


@pytest.fixture
def sphere1():
    return model("theta_sphere", 1)


@pytest.fixture
def proj1():
    return model("theta_projective", 1)


@pytest.fixture
def proj2():
    return model("theta_projective", 2)


@pytest.fixture
def free2():
    return model("free", 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
