import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspmass.scalars import QuadExt

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=20
)


def qe(p, u, v):
    return QuadExt(p, u, v)


@given(u1=rationals, v1=rationals, u2=rationals, v2=rationals)
@settings(max_examples=200, deadline=None)
def test_ring_operations_match_floats(u1, v1, u2, v2):
    p = 5
    a = qe(p, u1, v1)
    b = qe(p, u2, v2)
    fa, fb = float(a), float(b)
    assert math.isclose(float(a + b), fa + fb, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(float(a - b), fa - fb, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(float(a * b), fa * fb, rel_tol=1e-9, abs_tol=1e-9)


@given(u=rationals, v=rationals)
@settings(max_examples=200, deadline=None)
def test_inverse_roundtrip(u, v):
    if u == 0 and v == 0:
        return
    a = qe(7, u, v)
    norm = u * u - 7 * v * v
    if norm == 0:
        return
    assert a * a.inverse() == QuadExt(7, 1, 0)
    assert (1 / a) * a == 1


def test_componentwise_equality_and_rationality():
    a = qe(2, Fraction(1, 3), Fraction(2, 5))
    assert a != qe(2, Fraction(1, 3), Fraction(2, 5) + Fraction(1, 10**9))
    assert not a.is_rational
    b = a - qe(2, 0, Fraction(2, 5))
    assert b.is_rational and b.as_rational() == Fraction(1, 3)
    with pytest.raises(ValueError):
        a.as_rational()


def test_powers_and_mixed_arithmetic():
    isp = QuadExt(3, 0, Fraction(1, 3))  # 3^(-1/2)
    assert isp * isp == Fraction(1, 3)
    assert isp**2 == Fraction(1, 3)
    assert isp**-2 == 3
    assert float(2 + isp) == pytest.approx(2 + 3**-0.5)
    assert float(1 / (1 - isp * isp)) == pytest.approx(1 / (1 - 1 / 3))


def test_mixed_radicand_rejected():
    with pytest.raises(ValueError):
        qe(2, 1, 1) + qe(3, 1, 1)
