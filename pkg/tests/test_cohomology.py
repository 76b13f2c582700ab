import numpy as np
import pytest
from hypothesis import given

from conftest import model, rng_seeds
from oracles import plane_derham_dims
from ncx import cohomology as co
from ncx.calculus import Form, random_form
from ncx.linalg import random_theta
from ncx.scalar import ONE, lam


def pad(dims, n):
    return list(dims) + [0] * (2 * (n + 1) + 1 - len(dims))


@pytest.mark.parametrize("shift", [0, 1, 2])
def test_plane_n1_derham_matches_oracle(shift):
    m = model("theta_plane", 1)
    for s in range(5):
        for a in range(s + 1):
            assert pad(co.derham_dims(m, a, s - a), 1) == plane_derham_dims(1, a, s - a, shift)


def test_plane_n2_derham_matches_oracle_low_weights():
    m = model("theta_plane", 2)
    for a, b in [(0, 0), (1, 0), (1, 1), (2, 1), (0, 3)]:
        assert pad(co.derham_dims(m, a, b), 2) == plane_derham_dims(2, a, b)


def test_numeric_theta_agrees():
    m = model("theta_plane", 1)
    rng = np.random.default_rng(2)
    for _ in range(3):
        th = random_theta(rng, 2)
        for a, b in [(0, 0), (1, 1), (2, 1)]:
            assert co.derham_dims(m, a, b, theta=th) == co.derham_dims(m, a, b)
            assert co.dolbeault_dims(m, 1, a, b, theta=th) == co.dolbeault_dims(m, 1, a, b)


def test_plane_dolbeault_holomorphic_counts():
    m = model("theta_plane", 1)
    assert co.dolbeault_dims(m, 0, 3, 0) == [4]
    assert co.dolbeault_dims(m, 1, 3, 0) == [6]
    for a, b in [(1, 1), (2, 2), (0, 3)]:
        for p in range(min(a, 2) + 1):
            assert all(x == 0 for x in co.dolbeault_dims(m, p, a, b))


def test_operator_matrices_square_to_zero():
    m = model("theta_plane", 2)
    for op, keys in (("d", co.chain_keys(m, "d", 2, 2)), ("dbar", co.chain_keys(m, "dbar", 2, 2, p=1))):
        for k1, k2 in zip(keys, keys[1:]):
            A = co.operator_matrix(m, op, k1)
            B = co.operator_matrix(m, op, k2)
            if A.shape[0] == B.shape[1]:
                assert (B @ A).is_zero()


def test_truncation_guard():
    m = model("theta_plane", 1)
    with pytest.raises(co.TruncationExceeded):
        co.enumerate_block(m, co.BlockKey.derham(m.label, 1, 4, 4), bound=6)


def test_block_vector_outside_block_raises():
    m = model("theta_plane", 1)
    blk = co.enumerate_block(m, co.BlockKey.derham(m.label, 1, 1, 0))
    with pytest.raises(ValueError):
        blk.vector(m.calc.dfn("zb0"))
    f = m.calc.dfn("z1")
    assert blk.form(m.calc, blk.vector(f)) == f


def test_projective_derham_is_ill_defined():
    m = model("theta_projective", 1)
    with pytest.raises(co.IllDefinedOnQuotient):
        co.derham_dims(m, 1, 1)
    table = co.derham_table(m, 2)
    assert table["ill_defined"]


def test_projective_dbar_descends():
    m = model("theta_projective", 1)
    assert co.dolbeault_dims(m, 0, 1, 1) == [1, 0]
    assert co.dolbeault_dims(m, 0, 2, 2)[0] == 1


def test_projective_mixed_block_dimension():
    m = model("theta_projective", 1)
    blk = co.enumerate_block(m, co.BlockKey.dolbeault(m.label, 1, 1, 1, 1))
    assert blk.dim == 4 - blk.relation_rank
    assert len(blk) == 4


def test_sphere_complex_structure_is_ill_defined():
    m = model("theta_sphere", 1)
    with pytest.raises(co.IllDefinedOnQuotient):
        co.operator_images(m, "J", co.BlockKey.derham(m.label, 1, 1, 1))
    with pytest.raises(co.IllDefinedOnQuotient):
        co.enumerate_block(m, co.BlockKey.dolbeault(m.label, 0, 1, 1, 1))


def test_sphere_top_class_appears_at_level_three():
    m = model("theta_sphere", 1)
    assert co.derham_dims(m, 0, 0) == [1]
    assert co.derham_dims(m, 3, 3)[3] == 1


def test_theta_examples():
    m = model("theta_plane", 1)
    c = m.ambient
    t = co.theta_pq(m, c.dfn("z1") * c.dfn("zb1"))
    expected = co.TensorForm.from_pair(c.dfn("zb1"), c.dfn("z1")).scale(-ONE)
    assert t == expected
    t2 = co.theta_pq(m, c.dfn("zb0") * c.dfn("z0") * c.dfn("zb1"))
    e2 = co.TensorForm.from_pair(c.dfn("zb0") * c.dfn("zb1"), c.dfn("z0")).scale(-lam(0, 1, -1))
    assert t2 == e2


def test_theta_not_configured_on_quotients():
    with pytest.raises(co.NotApplicable):
        co.theta_pq(model("theta_sphere", 1), model("theta_sphere", 1).ambient.one())


@pytest.mark.parametrize("n", [1, 2])
@given(rng=rng_seeds())
def test_wedge_inverts_theta(n, rng):
    m = model("theta_plane", n)
    f = random_form(rng, m.ambient, max_degree=3)
    assert co.wedge_tensor(co.theta_pq(m, f)) == f


@pytest.mark.parametrize("n", [1, 2])
def test_theta_inverts_wedge_on_tensor_basis(n):
    m = model("theta_plane", n)
    amb = m.ambient
    for a, b in [(1, 1), (2, 1), (2, 2)]:
        for p in range(min(a, n + 1) + 1):
            for q in range(min(b, n + 1) + 1):
                for w in m.words(a, b, bidegree=(p, q)):
                    t = co.theta_pq(m, Form(amb, {w: ONE}, _normal=True))
                    assert co.theta_pq(m, co.wedge_tensor(t)) == t
