from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import scalars
from ncx.scalar import I, ONE, ZERO, NonSkewTheta, NotDivisible, Scalar, lam


def test_phase_skew_conventions():
    assert lam(1, 0) == lam(0, 1).inverse()
    assert lam(2, 2) == ONE
    assert lam(0, 1) * lam(1, 0) == ONE
    assert lam(0, 1, 3) == lam(0, 1) ** 3


def test_gaussian_units():
    assert I * I == -ONE
    assert (Scalar(3) + I * 4).conj() == Scalar(3) - I * 4
    assert Scalar(Fraction(1, 2)) * 2 == ONE


@given(scalars(), scalars(), scalars())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == ZERO


@given(scalars(), scalars())
def test_conjugation_is_ring_automorphism(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    assert a.conj().conj() == a


@given(scalars(), scalars())
def test_exact_division_recovers_factor(a, b):
    if not b:
        return
    assert (a * b).exact_div(b) == a


def test_inexact_division_raises():
    with pytest.raises(NotDivisible):
        (ONE + lam(0, 1)).exact_div(ONE - lam(0, 1))
    with pytest.raises(ZeroDivisionError):
        ONE.exact_div(ZERO)


def test_inverse_only_for_units():
    u = I * lam(0, 2, -3) * 5
    assert u * u.inverse() == ONE
    with pytest.raises(Exception):
        (ONE + lam(0, 1)).inverse()


@given(scalars(), scalars(), st.integers(0, 2**31))
def test_eval_numeric_is_homomorphism(a, b, seed):
    rng = np.random.default_rng(seed)
    t = rng.normal(size=(3, 3))
    th = t - t.T
    assert abs((a * b).eval_numeric(th) - a.eval_numeric(th) * b.eval_numeric(th)) < 1e-8
    assert abs((a + b).eval_numeric(th) - a.eval_numeric(th) - b.eval_numeric(th)) < 1e-8
    assert abs(a.conj().eval_numeric(th) - a.eval_numeric(th).conjugate()) < 1e-8


def test_eval_numeric_rejects_non_skew_theta():
    with pytest.raises(NonSkewTheta):
        lam(0, 1).eval_numeric(np.ones((2, 2)))


@given(scalars())
def test_text_roundtrip(a):
    assert Scalar.parse(str(a)) == a


def test_hashable_and_immutable():
    assert len({lam(0, 1), lam(0, 1), lam(1, 0).inverse()}) == 1
