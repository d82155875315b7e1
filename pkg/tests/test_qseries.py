"""Core series arithmetic: oracles first, then algebraic laws."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmforms.qseries import (
    FourierSeries,
    NonIntegerGrain,
    _intconv,
    lambert_block,
)

F = Fraction


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def conv_oracle(a, b, klim):
    out = [0] * (klim + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= klim:
                out[i + j] += x * y
    return out


def sigma_oracle(n, k):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


@given(
    st.lists(st.integers(-9, 9), min_size=1, max_size=40),
    st.lists(st.integers(-9, 9), min_size=1, max_size=40),
)
def test_intconv_matches_oracle_small(a, b):
    klim = len(a) + len(b) - 2
    assert _intconv(a, b, klim) == conv_oracle(a, b, klim)


def test_intconv_kronecker_path():
    # big enough to take the packed route, with mixed signs
    a = [(-1) ** i * (i * i + 1) for i in range(300)]
    b = [(i % 7) - 3 for i in range(280)]
    assert _intconv(a, b, 578) == conv_oracle(a, b, 578)
    assert _intconv(a, b, 120) == conv_oracle(a, b, 120)


# ---------------------------------------------------------------------------
# construction and access
# ---------------------------------------------------------------------------


def test_orders_and_coefficient_access():
    s = FourierSeries.from_coefficients([1, 2, 3], grain=1)
    assert s.order == 2
    assert s.coefficient(1) == 2
    assert s.coefficient(F(1, 2)) == 0  # not representable => genuinely absent
    with pytest.raises(ValueError):
        s.coefficient(3)

    h = FourierSeries.from_coefficients([0, 5, 0, 7, 1], grain=2)
    assert h.order == F(2)
    assert h.coefficient(F(1, 2)) == 5
    assert h.coefficient(F(3, 2)) == 7


def test_from_terms_infers_grain():
    s = FourierSeries.from_terms({F(1, 2): 3, 2: 1}, order=2)
    assert s.grain == 2
    assert s.coefficient(F(1, 2)) == 3
    assert s.coefficient(2) == 1


def test_leading_and_zero():
    z = FourierSeries.zero(5)
    assert z.leading() is None
    assert z.is_zero()
    s = FourierSeries.from_coefficients([0, 0, 4, 1])
    assert s.leading() == (2, 4)
    assert s.is_zero(through=1)
    assert not s.is_zero(through=2)


# ---------------------------------------------------------------------------
# arithmetic laws
# ---------------------------------------------------------------------------

small_series = st.builds(
    FourierSeries.from_coefficients,
    st.lists(
        st.fractions(max_denominator=12, min_value=-8, max_value=8),
        min_size=1,
        max_size=12,
    ),
    st.sampled_from([1, 2, 3]),
)


@given(small_series, small_series)
@settings(max_examples=60)
def test_mul_commutes(f, g):
    assert f * g == g * f


@given(small_series, small_series, small_series)
@settings(max_examples=40)
def test_mul_distributes(f, g, h):
    # align orders first: distributivity holds once all operands share a bound
    m = min(f.order, g.order, h.order)
    f, g, h = f.truncate(m), g.truncate(m), h.truncate(m)
    assert (f + g) * h == f * h + g * h


@given(small_series, small_series)
@settings(max_examples=60)
def test_leibniz_rule(f, g):
    lhs = (f * g).derivative()
    rhs = f.derivative() * g + f * g.derivative()
    assert lhs == rhs


def test_mul_truncation_tracks_absolute_order():
    f = FourierSeries.from_coefficients([1] * 11)          # order 10
    g = FourierSeries.from_coefficients([1] * 7, grain=2)  # order 3
    assert (f * g).order == F(3)
    assert (f + g).order == F(3)


def test_mul_fallback_on_huge_denominators():
    # denominators chosen so their lcm overflows the packing comfort zone
    big = [F(1, p) for p in (2**31 - 1, 2**61 - 1, 2305843009213693951, 998244353)]
    f = FourierSeries.from_coefficients(big)
    g = FourierSeries.from_coefficients([F(3), F(1, 7), F(2), F(5)])
    prod = f * g
    for k in range(4):
        acc = F(0)
        for i in range(k + 1):
            acc += big[i] * [F(3), F(1, 7), F(2), F(5)][k - i]
        assert prod.coefficient(k) == acc


def test_pow_matches_repeated_mul():
    f = FourierSeries.from_coefficients([1, -3, 2, 5, -1])
    assert f**3 == f * f * f
    assert (f**0).coefficient(0) == 1


def test_derivative_scales_by_exponent():
    h = FourierSeries.from_coefficients([2, 3, 0, 7], grain=2)
    d = h.derivative()
    assert d.coefficient(F(1, 2)) == F(3, 2)
    assert d.coefficient(F(3, 2)) == F(21, 2)
    assert d.coefficient(0) == 0


# ---------------------------------------------------------------------------
# dilate / half_shift / grain handling
# ---------------------------------------------------------------------------


def test_dilate_keeps_absolute_order():
    f = FourierSeries.from_coefficients([0, 1, 2, 3, 4, 5, 6])  # order 6
    g = f.dilate(2)
    assert g.order == 6
    assert g.coefficient(2) == 1
    assert g.coefficient(6) == 3
    assert g.coefficient(5) == 0


def test_dilate_reduces_grain():
    h = FourierSeries.from_coefficients([0, 1, 0, 2, 0], grain=2)  # q^{1/2}+2q^{3/2}
    g = h.dilate(2)
    assert g.grain == 1
    assert g.coefficient(1) == 1
    assert g.coefficient(2) == 0
    assert g.order == 2


@given(small_series)
@settings(max_examples=40)
def test_dilate_composes(f):
    assert f.dilate(2).dilate(3) == f.dilate(6)


def test_half_shift_signs():
    f = FourierSeries.from_coefficients([1, 1, 1, 1])
    s = f.half_shift()
    assert [s.coefficient(k) for k in range(4)] == [1, -1, 1, -1]
    # applying it twice is the identity
    assert s.half_shift() == f


def test_half_shift_accepts_even_support_grain2():
    h = FourierSeries.from_coefficients([1, 0, 2, 0, 3], grain=2)
    s = h.half_shift()
    assert s.grain == 1
    assert s.coefficient(1) == -2


def test_half_shift_rejects_true_half_exponents():
    h = FourierSeries.from_coefficients([0, 1, 0], grain=2)
    with pytest.raises(NonIntegerGrain):
        h.half_shift()


def test_reduced_is_lossless_on_even_support():
    h = FourierSeries.from_coefficients([1, 0, 2, 0, 3], grain=2)
    r = h.reduced()
    assert r.grain == 1
    assert r == h  # semantic equality across grains


# ---------------------------------------------------------------------------
# comparison discipline
# ---------------------------------------------------------------------------


def test_equality_up_to_refuses_beyond_order():
    f = FourierSeries.from_coefficients([1, 2, 3])
    g = FourierSeries.from_coefficients([1, 2])
    assert f.equality_up_to(g, 1)
    with pytest.raises(ValueError):
        f.equality_up_to(g, 2)


def test_first_difference_reports_exponent():
    f = FourierSeries.from_coefficients([1, 2, 3, 4])
    g = FourierSeries.from_coefficients([1, 2, 5, 4])
    e, a, b = f.first_difference(g)
    assert (e, a, b) == (2, 3, 5)


def test_cross_grain_equality():
    f = FourierSeries.from_coefficients([1, 0, 2])
    h = FourierSeries.from_coefficients([1, 0, 0, 0, 2], grain=2)
    assert f == h


# ---------------------------------------------------------------------------
# serialization / rendering
# ---------------------------------------------------------------------------


def test_json_round_trip_byte_identical():
    h = FourierSeries.from_coefficients([F(1), F(-3, 2), F(0), F(7)], grain=2)
    d = h.to_json_dict()
    blob = json.dumps(d, sort_keys=True)
    back = FourierSeries.from_json_dict(json.loads(blob))
    assert back == h
    assert json.dumps(back.to_json_dict(), sort_keys=True) == blob


def test_json_rejects_bad_length():
    with pytest.raises(ValueError):
        FourierSeries.from_json_dict(
            {"grain": 1, "order": 3, "coeffs": [["1", "1"]]}
        )


def test_str_golden_integer_case():
    s = FourierSeries.from_coefficients([0, 1, 2, 12, 4, 30])
    assert str(s) == "q + 2q^2 + 12q^3 + 4q^4 + 30q^5"


def test_str_signs_fractions_and_half_exponents():
    s = FourierSeries.from_terms({0: -1, 1: F(1, 2), F(3, 2): -3}, order=2)
    assert str(s) == "-1 + (1/2)q - 3q^{3/2}"
    assert str(FourierSeries.zero(4)) == "0"


# ---------------------------------------------------------------------------
# lambert blocks against divisor-sum oracles
# ---------------------------------------------------------------------------


def test_lambert_block_sigma():
    s = lambert_block(3, 40)
    for n in range(1, 41):
        assert s.coefficient(n) == sigma_oracle(n, 3)


def test_lambert_block_with_m_factor():
    s = lambert_block(6, 40, with_m_factor=True)
    for n in range(1, 41):
        assert s.coefficient(n) == n * sigma_oracle(n, 5)


def test_lambert_block_dilation():
    s = lambert_block(1, 30, dilation=2, with_m_factor=True)
    for n in range(1, 31):
        expected = (n // 2) * sigma_oracle(n // 2, 0) if n % 2 == 0 else 0
        assert s.coefficient(n) == expected
