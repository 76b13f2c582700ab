import numpy as np
import pytest

from conftest import model
from ncx import cohomology as co
from ncx import frolicher as fr
from ncx.calculus import Form
from ncx.scalar import ONE


@pytest.mark.parametrize("n", [1, 2])
def test_block_consistency(n):
    m = model("theta_plane", n)
    for a, b in [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)]:
        r = fr.frolicher_check(m, a, b)
        assert r["euler_agrees"]
        assert r["d1_squared_zero"]
        assert r["filtration_compatible"]


def test_e1_is_dolbeault():
    m = model("theta_plane", 1)
    bc = fr.Bicomplex.from_model(m, 2, 0)
    e1 = fr.e1_page(bc)
    for p in range(3):
        dims = co.dolbeault_dims(m, p, 2, 0)
        assert e1.entries[(p, 0)] == dims[0]


def test_e2_differs_from_e1_on_holomorphic_block():
    m = model("theta_plane", 1)
    r = fr.frolicher_check(m, 1, 0)
    assert r["E1"] == {"0,0": 2, "1,0": 2}
    assert r["E2"] == {"0,0": 0, "1,0": 0}
    assert r["derham"] == [0, 0]
    assert not r["d1_zero"]


def test_synthetic_control_degenerates_late():
    rng = np.random.default_rng(0)
    bc = fr.synthetic_bicomplex(rng)
    e1 = fr.e1_page(bc)
    e2 = fr.e2_page(e1)
    assert e1.entries == bc.dims
    assert sum(e2.entries.values()) < sum(e1.entries.values())
    assert e1.euler() == e2.euler()


def test_holomorphic_forms_operator():
    m = model("theta_plane", 1)
    amb = m.ambient
    nab = fr.nabla_on_holomorphic_forms(m, 1)
    for a, b in [(1, 1), (2, 1), (2, 2)]:
        for q in range(min(b, 2) + 1):
            assert nab.curvature_zero(q, a, b)
        assert nab.cohomology_dims(a, b) == co.dolbeault_dims(m, 1, a, b)
    e = amb.fn(2) * amb.dfn(0)
    t = co.TensorForm.from_pair(amb.fn(3) * amb.dfn(2), e)
    assert nab(t) == nab.leibniz(t)
    assert nab(nab(t)).is_zero()


def test_holomorphic_forms_leibniz_on_basis():
    m = model("theta_plane", 1)
    amb = m.ambient
    nab = fr.nabla_on_holomorphic_forms(m, 1)
    for w in m.words(2, 1, bidegree=(1, 1)):
        t = co.theta_pq(m, Form(amb, {w: ONE}, _normal=True))
        assert nab(t) == nab.leibniz(t)
