import pytest
from hypothesis import given

from conftest import model, rng_seeds
from oracles import reversal_sign
from ncx.algebra import free_presentation, theta_presentation
from ncx.calculus import ThetaCalculus, UniversalCalculus, d, epsilon, parse_form, random_form
from ncx.scalar import ONE, lam

KINDS = [("free", 2), ("theta_plane", 1), ("theta_plane", 2), ("theta_sphere", 1)]


def test_epsilon_matches_permutation_sign():
    assert [epsilon(n) for n in range(7)] == [reversal_sign(n) for n in range(7)]


def test_plane_form_relations():
    c = ThetaCalculus(theta_presentation(1))
    z0, z1 = c.fn("z0"), c.fn("z1")
    dz0, dz1 = c.dfn("z0"), c.dfn("z1")
    assert z0 * dz1 == (dz1 * z0).scale(lam(0, 1))
    assert dz0 * dz1 == -(dz1 * dz0).scale(lam(0, 1))
    assert (dz0 * dz0).is_zero()
    assert d(z0 * z1) == dz0 * z1 + z0 * dz1


def test_universal_calculus_has_no_relations():
    c = UniversalCalculus(free_presentation(1))
    x = c.fn(0)
    dx = c.dfn(0)
    assert not (dx * dx).is_zero()
    assert x * dx != dx * x
    assert d(x * x) == dx * x + x * dx


def test_power_is_repeated_wedge():
    c = ThetaCalculus(theta_presentation(1))
    f = c.fn("z0") + c.dfn("zb1")
    assert f ** 3 == f * f * f
    assert f ** 0 == c.one()
    with pytest.raises(ValueError):
        f ** -1


def test_parse_roundtrip():
    c = ThetaCalculus(theta_presentation(1))
    f = parse_form(c, "2 z0 dz1 + i zb0 dzb0 dz0")
    assert parse_form(c, str(f)) == f


@pytest.mark.parametrize("kind,n", KINDS)
@given(rng=rng_seeds())
def test_dga_laws(kind, n, rng):
    m = model(kind, n)
    a = random_form(rng, m.calc, max_degree=2)
    b = random_form(rng, m.calc, max_degree=2)
    assert m.is_zero(d(d(a)))
    assert m.is_zero(a.star().star() - a)
    assert m.is_zero(d(a).star() - d(a.star()))
    lhs = d(a * b)
    rhs = m.calc.zero()
    for k in a.degrees():
        ak = a.homogeneous(k)
        rhs = rhs + d(ak) * b + (ak * d(b)).scale(ONE if k % 2 == 0 else -ONE)
    assert m.is_zero(lhs - rhs)


@pytest.mark.parametrize("kind,n", KINDS)
@given(rng=rng_seeds())
def test_wedge_associative(kind, n, rng):
    m = model(kind, n)
    a, b, c = (random_form(rng, m.calc, max_degree=2) for _ in range(3))
    assert (a * b) * c == a * (b * c)


def test_n0_plane_is_graded_commutative():
    c = ThetaCalculus(theta_presentation(0))
    z, zb = c.fn("z0"), c.fn("zb0")
    dz, dzb = c.dfn("z0"), c.dfn("zb0")
    assert z * zb == zb * z
    assert z * dzb == dzb * z
    assert dz * dzb == -(dzb * dz)
