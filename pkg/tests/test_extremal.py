"""Families, component laws, and the exact max-vanishing solver."""

from __future__ import annotations

from fractions import Fraction

import pytest

from qmforms.extremal import (
    BadWeight,
    Depth1Components,
    a_w_exponent,
    alpha_w0,
    describe_label,
    extremal_depth2,
    form_by_label,
    known_labels,
    level2_families,
    weak_family,
    x_w1,
    x_w1_components,
    x_w2,
    xtilde_form,
    y_form,
)
from qmforms.forms import sigma, tau

F = Fraction


# ---------------------------------------------------------------------------
# depth-1 family against divisor-sum oracles
# ---------------------------------------------------------------------------


def test_x61_x81_x101_divisor_forms():
    n = 40
    x6, x8, x10 = x_w1(6, n), x_w1(8, n), x_w1(10, n)
    for m in range(1, n + 1):
        assert x6.coefficient(m) == m * sigma(m, 3)
        assert x8.coefficient(m) == m * sigma(m, 5)
        assert x10.coefficient(m) == m * sigma(m, 7)


def test_x121_coefficient_law():
    n = 30
    x12 = x_w1(12, n)
    for m in range(1, n + 1):
        assert x12.coefficient(m) == F(m * sigma(m, 9) - tau(m), 1050)
    assert x12.coefficient(2) == 1
    assert x12.coefficient(3) == 56


def test_x141_starts_at_q2():
    x14 = x_w1(14, 6)
    assert x14.leading() == (2, 1)


def test_higher_weight_vanishing_orders():
    # the defining property: X_{w,1} vanishes to order w/6 (rounded down)
    for w in (18, 20, 22, 24):
        lead = x_w1(w, 8).leading()
        assert lead is not None
        assert lead[0] == w // 6


def test_bad_weights_rejected():
    with pytest.raises(BadWeight):
        x_w1(7, 10)
    with pytest.raises(BadWeight):
        x_w1(4, 10)
    with pytest.raises(BadWeight):
        x_w2(6, 10)


# ---------------------------------------------------------------------------
# component pairs
# ---------------------------------------------------------------------------


def test_components_recompose_to_family():
    for w in (6, 8, 10, 12, 14, 16, 18, 24):
        comp = x_w1_components(w, 25)
        assert comp.recompose() == x_w1(w, 25), w


def test_component_seeds():
    c6 = x_w1_components(6, 4)
    assert c6.pure.coefficient(0) == F(-1, 720)
    assert c6.e2_part.coefficient(0) == F(1, 720)
    c12 = x_w1_components(12, 2)
    assert c12.pure.coefficient(0) == F(1, 332640)
    assert c12.e2_part.coefficient(0) == F(-1, 332640)
    c14 = x_w1_components(14, 2)
    assert c14.pure.coefficient(0) == F(-1, 393120)
    assert c14.e2_part.coefficient(0) == F(1, 393120)


def test_constant_term_closed_form():
    for w in range(6, 61, 6):
        assert alpha_w0(w) == x_w1_components(w, 2).pure.coefficient(0)


def test_constant_term_laws():
    # for weights divisible by 6:
    #   next-step constants scale by -(w-1)/(w+1), 1, -(w(w+6))/(432(w+1)(w+5))
    for w in range(6, 55, 6):
        a_w = x_w1_components(w, 2).pure.coefficient(0)
        a_w2 = x_w1_components(w + 2, 2).pure.coefficient(0)
        a_w4 = x_w1_components(w + 4, 2).pure.coefficient(0)
        a_w6 = x_w1_components(w + 6, 2).pure.coefficient(0)
        assert a_w2 == -F(w - 1, w + 1) * a_w
        assert a_w4 == a_w
        assert a_w6 == -F(w * (w + 6), 432 * (w + 1) * (w + 5)) * a_w


def test_e2_component_constant_is_minus_next_pure():
    for w in range(6, 41, 2):
        comp = x_w1_components(w, 2)
        assert comp.e2_part.coefficient(0) == -comp.pure.coefficient(0)


def test_second_coefficient_ratio_laws():
    # all six ratio laws at weights divisible by 6
    for w in range(12, 37, 6):
        cw = x_w1_components(w, 2)
        cw2 = x_w1_components(w + 2, 2)
        cw4 = x_w1_components(w + 4, 2)

        def ratio(series):
            return series.coefficient(1) / series.coefficient(0)

        assert ratio(cw.pure) == F(-12 * (w - 3) * (w + 4), w - 6)
        assert ratio(cw2.pure) == F(-12 * (w * w - 9 * w - 24), w - 6)
        assert ratio(cw4.pure) == F(-12 * (w * w - 19 * w + 108), w - 6)
        assert ratio(cw.e2_part) == F(-12 * (w - 1) * w, w - 6)
        assert ratio(cw2.e2_part) == F(-12 * (w - 12) * (w + 1), w - 6)
        assert ratio(cw4.e2_part) == F(-12 * (w * w - 21 * w + 120), w - 6)


# ---------------------------------------------------------------------------
# decay exponent
# ---------------------------------------------------------------------------


def test_a_w_values():
    assert [a_w_exponent(w) for w in (6, 8, 10, 12, 14, 16)] == [5, 6, 8, 10, 11, 13]
    for k in range(1, 100):
        assert a_w_exponent(6 * k) == 5 * k


def test_a_w_minimum_recurrences():
    # the three step laws jointly determine a_w as a minimum, every even
    # weight up to 600
    a = a_w_exponent
    for w in range(12, 601, 6):
        assert a(w) == min(a(w - 4) + 4, a(w - 6) + 5)
        if w + 2 <= 600:
            assert a(w + 2) == min(a(w - 2) + 4, a(w - 4) + 5)
        if w + 4 <= 600:
            assert a(w + 4) == min(a(w) + 4, a(w - 2) + 5, a(w - 4) + 7)


# ---------------------------------------------------------------------------
# depth 2: explicit forms and the solver
# ---------------------------------------------------------------------------


def test_x42_divisor_form():
    x = x_w2(4, 30)
    for n in range(1, 31):
        assert x.coefficient(n) == n * sigma(n, 1)


def test_x82_x102_divisor_forms():
    n = 30
    x8 = x_w2(8, n)
    x10 = x_w2(10, n)
    for m in range(1, n + 1):
        assert x8.coefficient(m) == F(m * sigma(m, 5) - m * m * sigma(m, 3), 30)
        assert x10.coefficient(m) == F(m * sigma(m, 7) - m * m * sigma(m, 5), 126)


def test_x122_divisor_form():
    n = 20
    x12 = x_w2(12, n)
    for m in range(1, n + 1):
        want = F(17 * tau(m), 21) + F(6 * m * sigma(m, 9), 7) - F(5 * m * m * sigma(m, 7), 3)
        assert x12.coefficient(m) == want / 18000


def test_x142_golden_prefix():
    x14 = x_w2(14, 8)
    got = [x14.coefficient(n) for n in range(9)]
    assert got == [0, 0, 0, 1, F(93, 2), 810, 8004, 54474, 283743]


def test_x162_golden_prefix():
    x16 = x_w2(16, 6)
    assert x16.leading() == (4, 1)
    assert x16.coefficient(5) == F(864, 25)
    assert x16.coefficient(6) == F(2736, 5)


def test_solver_agrees_with_explicit_forms():
    for w in (4, 8, 10, 12, 14):
        assert extremal_depth2(w, 20) == x_w2(w, 20), w


def test_solver_recovers_depth1_seed():
    # at weight 6 the depth<=2 space is {E6, E2 E4}; the solver lands on the
    # depth-1 family seed
    assert extremal_depth2(6, 20) == x_w1(6, 20)


def test_vanishing_orders_table():
    want = {4: 1, 8: 2, 10: 2, 12: 3, 14: 3, 16: 4}
    for w, v in want.items():
        assert x_w2(w, 6).leading()[0] == v


# ---------------------------------------------------------------------------
# level-2 difference families
# ---------------------------------------------------------------------------


Y_GOLDENS = {
    4: {1: 1, 2: 2, 3: 12, 4: 4, 5: 30},
    8: {2: 1, 3: 16, 4: 38, 5: 416, 6: 284},
    10: {2: 1, 3: F(104, 3), 4: 134, 5: 2480, 6: F(6796, 3)},
    12: {3: 1, 4: F(51, 2), 5: F(1422, 5), 6: 920, 7: 9714},
    14: {3: 1, 4: F(93, 2), 5: 810, 6: 3908, 7: 54474, 8: 93279},
    16: {4: 1, 5: F(864, 25), 6: F(2736, 5), 7: F(188288, 35), 8: F(107998, 5), 9: F(1051008, 5)},
}


def test_y_family_goldens():
    for w, table in Y_GOLDENS.items():
        y = y_form(w, max(table) + 1)
        for n, c in table.items():
            assert y.coefficient(n) == c, (w, n)


def test_xtilde_vs_y_offset():
    # Xtilde - Y = -2^(w-2) X(2z), so the difference is supported on even
    # exponents with the doubled-argument coefficients
    w, n = 8, 12
    diff = xtilde_form(w, n) - y_form(w, n)
    x = x_w2(w, n)
    for m in range(1, n // 2 + 1):
        assert diff.coefficient(2 * m) == -(2 ** (w - 2)) * x.coefficient(m)


def test_weak_family_p3():
    # weight 6, doubling: subtract 2^5 times the dilate
    wf = weak_family(6, 2, 12)
    x6 = x_w1(6, 12)
    for n in range(1, 13):
        want = x6.coefficient(n)
        if n % 2 == 0:
            want -= 32 * x6.coefficient(n // 2)
        assert wf.coefficient(n) == want


def test_level2_families_keys():
    fam = level2_families(8, 10)
    assert set(fam) == {"Y", "Xtilde", "weak"}
    fam4 = level2_families(4, 10)
    assert set(fam4) == {"Y", "Xtilde"}
    with pytest.raises(BadWeight):
        level2_families(5, 10)


# ---------------------------------------------------------------------------
# label registry
# ---------------------------------------------------------------------------


def test_form_by_label_patterns():
    assert form_by_label("X12_1", 8) == x_w1(12, 8)
    assert form_by_label("X8_2", 8) == x_w2(8, 8)
    assert form_by_label("Y12_2", 8) == y_form(12, 8)
    assert form_by_label("Xtilde8_2", 8) == xtilde_form(8, 8)
    assert form_by_label("Delta", 8).leading() == (1, 1)
    assert form_by_label("P1", 8) == xtilde_form(4, 8)
    assert form_by_label("P3", 8) == weak_family(6, 2, 8)


def test_p4_uses_w_minus_1_exponent():
    p4 = form_by_label("P4", 8)
    x12 = x_w1(12, 8)
    assert p4.coefficient(2) == 1  # q^2 survives: 1 - 2^11 * 0
    assert p4.coefficient(4) == x12.coefficient(4) - 2**11 * x12.coefficient(2)


def test_unknown_labels_raise():
    with pytest.raises(KeyError):
        form_by_label("nope", 8)
    with pytest.raises(KeyError):
        form_by_label("Z9_9", 8)


def test_descriptors_cover_known_labels():
    for label in known_labels():
        d = describe_label(label)
        assert d.label == label
        assert d.weight >= 2
        assert d.group
