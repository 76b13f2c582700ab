import numpy as np
import pytest
from hypothesis import given

from conftest import model, rng_seeds
from oracles import plane_block_sizes
from ncx import cohomology as co
from ncx.calculus import Form, random_form
from ncx.linalg import RowSpace
from ncx.models import (KINDS, ModelDescriptor, build, default_max_weight, line_module,
                        matmul_forms, projectors)
from ncx.scalar import ONE


def test_descriptor_validation():
    with pytest.raises(ValueError):
        ModelDescriptor("torus", 1)
    with pytest.raises(ValueError):
        ModelDescriptor("theta_plane", 4)
    with pytest.raises(ValueError):
        ModelDescriptor("free", 0)
    with pytest.raises(ValueError):
        ModelDescriptor("theta_plane", -1)
    md = ModelDescriptor("theta_sphere", 2, max_weight=5)
    assert ModelDescriptor.from_json(md.to_json()) == md


def test_max_weight_env(monkeypatch):
    monkeypatch.setenv("NCX_MAX_WEIGHT", "3")
    assert default_max_weight() == 3
    assert ModelDescriptor("theta_plane", 1).max_weight == 3
    monkeypatch.setenv("NCX_MAX_WEIGHT", "x")
    with pytest.raises(ValueError):
        default_max_weight()
    monkeypatch.setenv("NCX_MAX_WEIGHT", "0")
    with pytest.raises(ValueError):
        default_max_weight()


@pytest.mark.parametrize("kind", KINDS)
def test_every_kind_builds(kind):
    m = build(kind, 2)
    assert m.kind == kind
    assert len(m.pres.generators) == (4 if kind == "free" else 6)
    assert len(m.calc.one_form_generators()) == len(m.pres.generators)


def test_plane_block_sizes_are_multinomial():
    for n in (0, 1, 2):
        m = model("theta_plane", n)
        for a in range(4):
            for b in range(4 - a):
                sizes = [len(m.words(a, b, degree=k)) for k in range(2 * n + 3)]
                assert sizes == plane_block_sizes(n, a, b)


def test_n0_plane_has_classical_dolbeault():
    m = model("theta_plane", 0)
    for a in range(4):
        for b in range(4):
            if a + b == 0:
                continue
            for p in range(2):
                dims = co.dolbeault_dims(m, p, a, b)
                assert dims[1:] == [0] * (len(dims) - 1)
            assert co.derham_dims(m, a, b) == [0] * len(co.derham_dims(m, a, b))
    assert co.dolbeault_dims(m, 0, 2, 0) == [1]


def test_sphere_radius_relation():
    m = model("theta_sphere", 1)
    amb = m.ambient
    assert m.is_zero(amb.fn(0) * amb.fn(2) + amb.fn(1) * amb.fn(3) - amb.one())
    assert m.is_zero(m.relations[0][1])
    assert not m.is_zero(amb.dfn(0))


def test_projective_relations_are_charge_zero_and_bigraded():
    m = model("theta_projective", 1)
    names = [r[0] for r in m.relations]
    assert names == ["del_r2", "dbar_r2"]
    for _, f, bd in m.relations:
        for w in f.terms:
            wa, wb = m.ambient.weights(w)
            assert wa == wb
            assert m.ambient.bidegree(w) == bd


@given(rng_seeds())
def test_sphere_equality_is_compatible_with_products(rng):
    m = model("theta_sphere", 1)
    amb = m.ambient
    f = random_form(rng, amb, max_degree=1)
    rel = m.relations[0][1]
    assert m.is_zero(f * rel) and m.is_zero(rel * f)
    assert m.is_zero(f * (m.r2 - amb.one()))


@pytest.mark.parametrize("n", [1, 2])
def test_projectors_are_idempotent(n):
    m = model("theta_sphere", n)
    P, Q = projectors(m)
    for M in (P, Q):
        MM = matmul_forms(M, M)
        for i, row in enumerate(M):
            for j, x in enumerate(row):
                assert m.is_zero(MM[i][j] - x)


def test_star_maps_grade_m_to_minus_m():
    m = model("theta_sphere", 1)
    amb = m.ambient
    for a, b in [(1, 0), (2, 0), (2, 1), (0, 3)]:
        for w in m.words(a, b, degree=0):
            s = Form(amb, {w: ONE}, _normal=True).star()
            for w2 in s.terms:
                assert amb.weights(w2) == (b, a)


def test_line_module_bounds():
    m = model("theta_projective", 1)
    assert line_module(m, 0).m == 0
    with pytest.raises(ValueError):
        line_module(m, 5)
    with pytest.raises(ValueError):
        line_module(model("theta_plane", 1), 0)


def test_grade_one_generated_by_coordinates():
    m = model("theta_sphere", 1)
    amb = m.ambient
    for level in range(1, 4):
        a, b = level, level - 1
        words = m.words(a, b, degree=0)
        idx = {w: i for i, w in enumerate(words)}
        span = RowSpace()
        for w0 in m.words(a - 1, b, degree=0):
            for mu in m.z_ids():
                f = Form(amb, {w0: ONE}, _normal=True) * amb.fn(mu)
                span.add({idx[w]: c for w, c in f.terms.items()})
        assert span.rank == len(words)


def test_grade_zero_module_is_the_algebra():
    m = model("theta_projective", 1)
    E = line_module(m, 0)
    f = m.ambient.fn(0) * m.ambient.fn(2)
    assert E.contains(f)
    assert E.nabla(f) == co.apply_operator(m, "dbar", f)
