from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadtoric.scalars import (
    ONE,
    ZERO,
    NovikovScalar,
    T,
    exponent_denominator_of,
    format_scalar,
    is_laurent,
    nov_inverse,
    rescale_exponents,
    scalar_from_text,
    scalar_to_text,
    valuation,
)

exponents = st.builds(Fraction, st.integers(-8, 8), st.sampled_from([1, 2, 3, 4, 6]))
coeffs = st.builds(Fraction, st.integers(-9, 9).filter(bool), st.integers(1, 5))
scalars = st.lists(st.tuples(exponents, coeffs), max_size=4).map(NovikovScalar)
nonzero = scalars.filter(lambda a: not a.is_zero())


@given(scalars, scalars, scalars)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + ZERO == a and a * ONE == a
    assert (a - a).is_zero()


@given(nonzero, nonzero)
def test_valuation_laws(a, b):
    assert valuation(a * b) == valuation(a) + valuation(b)
    s = a + b
    if not s.is_zero():
        assert valuation(s) >= min(valuation(a), valuation(b))
        if valuation(a) != valuation(b):
            assert valuation(s) == min(valuation(a), valuation(b))


@settings(max_examples=200)
@given(nonzero, st.integers(1, 6))
def test_inverse_truncation(a, cutoff):
    r = a * nov_inverse(a, cutoff) - ONE
    assert r.is_zero() or valuation(r) > cutoff


@given(scalars)
def test_text_roundtrip(a):
    assert scalar_from_text(scalar_to_text(a)) == a


def test_canonical_form_merges_and_drops():
    a = NovikovScalar([(1, 2), (Fraction(1, 2), 3), (1, -2)])
    assert a.terms == ((Fraction(1, 2), 3),)
    assert NovikovScalar([(0, 0)]).is_zero()


def test_geometric_series_inverse():
    # 1/(1 - T) = 1 + T + ... + T^cutoff
    inv = nov_inverse(ONE - T(1), cutoff=5)
    assert inv == NovikovScalar([(k, 1) for k in range(6)])


def test_inverse_of_monomial_is_exact():
    assert nov_inverse(T(Fraction(-1, 3), 4)) == T(Fraction(1, 3), Fraction(1, 4))
    with pytest.raises(ZeroDivisionError):
        nov_inverse(ZERO)


def test_valuation_of_zero_undefined():
    with pytest.raises(ValueError):
        valuation(ZERO)


def test_laurent_and_denominators():
    a = T(Fraction(1, 2)) + T(Fraction(-2, 3))
    assert not is_laurent(a)
    assert exponent_denominator_of(a) == 6
    assert is_laurent(rescale_exponents(a, 6))
    assert exponent_denominator_of(T(3) + ONE) == 1


def test_float_exponent_is_exact_binary_fraction():
    assert T(0.5) == T(Fraction(1, 2))


def test_evaluate():
    a = T(1, 2) + T(Fraction(1, 2), -1)
    assert a.evaluate(4.0) == pytest.approx(8 - 2)


def test_format_conventions():
    # t = T^{-1}: T^{-1} reads as t
    assert format_scalar(T(-1), convention="t") == "1*t^(1)"
    assert format_scalar(T(Fraction(1, 2), 3)) == "3*T^(1/2)"
    assert format_scalar(ZERO) == "0"
