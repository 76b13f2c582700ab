import pytest

from conftest import model
from oracles import reversal_sign
from ncx import suites
from ncx.models import build

MODELS = [("free", 1), ("theta_plane", 1), ("theta_sphere", 1)]


@pytest.mark.parametrize("kind,n", MODELS)
def test_axiom_suite_passes(kind, n):
    rep = suites.axiom_suite(model(kind, n), samples=40, seed=5)
    assert rep["passed"], rep["failures"]
    assert all(v["total"] == 40 for v in rep["laws"].values())


def test_axiom_suite_reports_failures():
    from ncx import acs

    m = build("theta_plane", 1)
    m.acs = acs.conjugated_acs(m.calc)
    rep = suites.dolbeault_suite(m, samples=40, seed=1)
    assert not rep["passed"] and rep["failures"]


def test_epsilon_table_against_permutation_signs():
    rows = suites.epsilon_table(model("free", 2))["rows"]
    assert all(rows[n]["computed"] == reversal_sign(n) for n in range(7))


def test_seeded_streams_reproducible():
    a = suites.rng_for(3, 1).integers(0, 10**9, size=4)
    b = suites.rng_for(3, 1).integers(0, 10**9, size=4)
    c = suites.rng_for(3, 2).integers(0, 10**9, size=4)
    assert list(a) == list(b) and list(a) != list(c)
