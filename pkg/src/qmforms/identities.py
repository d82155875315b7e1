"""Registry of exact series identities, each verified to zero residual.

Every entry pairs two independently constructed q-expansions and checks
that they agree coefficient-for-coefficient, as exact rationals, up to a
stated truncation order.  A failure reports the first offending exponent
and the residual there, which makes normalization mistakes immediately
visible.  Finite-order agreement is a verification, not a proof; the
default order (120) is far above the classical coefficient bounds for
the weights and levels that occur here.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .extremal import x_w1, x_w1_components, x_w2, xtilde_form, y_form
from .forms import (
    DEFAULT_ORDER,
    composite_forms,
    delta_series,
    e2_half_arguments,
    eisenstein,
    martin_royer_bracket,
    serre_derivative,
    sigma_table,
    theta_forms,
)
from .lambert import eulerian_numerator
from .qseries import FourierSeries, lambert_block

Pair = tuple[FourierSeries, FourierSeries]


class UnknownIdentity(KeyError):
    """Raised when an identity id is not in the registry."""


@dataclass(frozen=True)
class IdentityCase:
    """One registry entry: an id, a human-readable statement, and a builder.

    ``build(order)`` returns one or more (lhs, rhs) series pairs; the case
    passes when every pair agrees through the stated order.
    """

    ident: str
    anchor: str
    default_order: int
    build: Callable[[int], Sequence[Pair]]


@dataclass(frozen=True)
class IdentityResult:
    ident: str
    status: str  # "pass" or "fail"
    order: int
    first_bad_exponent: Fraction | None
    residual: Fraction | None
    elapsed: float

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json_dict(self) -> dict:
        bad = self.first_bad_exponent
        res = self.residual
        return {
            "ident": self.ident,
            "status": self.status,
            "order": self.order,
            "first_bad_exponent": None if bad is None else str(bad),
            "residual": None if res is None else [str(res.numerator), str(res.denominator)],
            "elapsed": round(self.elapsed, 6),
        }


# ---------------------------------------------------------------------------
# building blocks shared by several entries
# ---------------------------------------------------------------------------


def eulerian_expansion(k: int, order: int, *, weighted: bool) -> FourierSeries:
    """sum over m of w(m) q^m W_k(q^m) / (1 - q^m)^(k+1), to the given order.

    W_k is the degree-(k-1) Eulerian numerator, and w(m) is m when
    ``weighted`` (giving sum n sigma_{k-1}(n) q^n) and 1 otherwise
    (giving sum sigma_k(n) q^n).
    """
    w = eulerian_numerator(k)
    out = [0] * (order + 1)
    for m in range(1, order + 1):
        factor = m if weighted else 1
        for i, wi in enumerate(w):
            base = m * (i + 1)
            if base > order:
                break
            j = 0
            while base + m * j <= order:
                out[base + m * j] += factor * wi * math.comb(j + k, k)
                j += 1
    return FourierSeries.from_coefficients(out)


_LCOMB_COEFFS = {
    "A": (78278400, 550800, 90823680, 116640, 678813696000, 331776000),
    "APRIME": (43027200, 550800, 60963840, 116640, 339075072000, 331776000),
}


def lcomb_combination(
    order: int,
    coeffs: Sequence[int] | None = None,
    variant: str = "A",
) -> FourierSeries:
    """The six-term weight-14 combination that the L entries compare against.

    Variant "A" pairs each dilated depth-2 form with its Xtilde companion;
    variant "APRIME" uses the Y companions instead (same a_2/a_4/a_6, with
    the dilated coefficients absorbing the difference).  Passing explicit
    ``coeffs`` overrides the stored ones — useful as a negative control,
    since any perturbation must show up at a small exponent.
    """
    if variant not in _LCOMB_COEFFS:
        raise ValueError(f"variant must be 'A' or 'APRIME', not {variant!r}")
    a = tuple(coeffs) if coeffs is not None else _LCOMB_COEFFS[variant]
    if len(a) != 6:
        raise ValueError("exactly six coefficients required")
    th = theta_forms(order)
    ab, bb = th["A"], th["B"]
    companion = xtilde_form if variant == "A" else y_form
    x8, x10, x12 = x_w2(8, order), x_w2(10, order), x_w2(12, order)
    return (
        a[0] * (x8.dilate(2) * ab * bb)
        + a[1] * (companion(8, order) * ab * bb)
        + a[2] * (x10.dilate(2) * ab)
        + a[3] * (companion(10, order) * ab)
        + a[4] * (x12.dilate(2) * bb)
        + a[5] * (companion(12, order) * bb)
    )


def series_divide(num: FourierSeries, den: FourierSeries, through) -> FourierSeries:
    """Exact series quotient num/den through the given absolute exponent.

    The divisor's leading coefficient must be nonzero; exponents of the
    quotient start at num's leading exponent minus den's.
    """
    lead = den.leading()
    if lead is None:
        raise ZeroDivisionError("division by the zero series")
    e0, c0 = lead
    grain = den.grain if den.grain == num.grain else None
    if grain is None:
        # align the two grains first
        g = den.grain * num.grain // math.gcd(den.grain, num.grain)
        num = num.with_grain(g)
        den = den.with_grain(g)
        grain = g
    shift = int(e0 * grain)
    dvals = den._coeffs_at_grain(grain)[shift:]
    nvals = list(num._coeffs_at_grain(grain))
    top = int(Fraction(through) * grain)
    if top + shift >= len(nvals):
        raise ValueError(
            f"quotient through {Fraction(through)} needs numerator coefficients "
            f"beyond its stored order {num.order}"
        )
    out = []
    for i in range(top + 1):
        acc = nvals[i + shift]
        for j in range(1, min(i, len(dvals) - 1) + 1):
            acc -= dvals[j] * out[i - j]
        out.append(acc / c0)
    return FourierSeries.from_coefficients(out, grain=grain)


# ---------------------------------------------------------------------------
# the registry
# ---------------------------------------------------------------------------


def _ram_1(order: int) -> list[Pair]:
    e2, e4 = eisenstein(2, order), eisenstein(4, order)
    return [(12 * e2.derivative(), e2 * e2 - e4)]


def _ram_2(order: int) -> list[Pair]:
    e2, e4, e6 = (eisenstein(k, order) for k in (2, 4, 6))
    return [(3 * e4.derivative(), e2 * e4 - e6)]


def _ram_3(order: int) -> list[Pair]:
    e2, e4, e6 = (eisenstein(k, order) for k in (2, 4, 6))
    return [(2 * e6.derivative(), e2 * e6 - e4 * e4)]


def _delta(order: int) -> list[Pair]:
    e4, e6 = eisenstein(4, order), eisenstein(6, order)
    return [(1728 * delta_series(order), e4 * e4 * e4 - e6 * e6)]


def _e2l2(order: int) -> list[Pair]:
    half, half_shifted = e2_half_arguments(order)
    e2 = eisenstein(2, order)
    return [(half + half_shifted, 6 * e2 - 4 * e2.dilate(2))]


def _lambert_x(w: int, k: int) -> Callable[[int], list[Pair]]:
    def build(order: int) -> list[Pair]:
        x = x_w1(w, order)
        return [
            (x, lambert_block(k, order, with_m_factor=True)),
            (x, eulerian_expansion(k, order, weighted=True)),
        ]

    return build


def _lambert_4(order: int) -> list[Pair]:
    e4 = eisenstein(4, order)
    return [
        (e4 - 1, 240 * lambert_block(3, order)),
        (e4 - 1, 240 * eulerian_expansion(3, order, weighted=False)),
    ]


def _lambert_5(order: int) -> list[Pair]:
    e2 = eisenstein(2, order)
    lhs = e2.dilate(2) - e2
    rhs = 24 * (lambert_block(1, order) - lambert_block(1, order, dilation=2))
    return [(lhs, rhs)]


def _grab(w: int) -> Callable[[int], list[Pair]]:
    def build(order: int) -> list[Pair]:
        xw = x_w1(w, order)
        e4, e6 = eisenstein(4, order), eisenstein(6, order)
        return [
            (x_w1(w + 2, order), Fraction(12, w + 1) * serre_derivative(xw, w - 1)),
            (x_w1(w + 4, order), e4 * xw),
            (
                x_w1(w + 6, order),
                Fraction(w + 6, 864 * (w + 5)) * (e4 * x_w1(w + 2, order) - e6 * xw),
            ),
        ]

    return build


def _lee(w: int) -> Callable[[int], list[Pair]]:
    def build(order: int) -> list[Pair]:
        x6, x8, x10 = x_w1(6, order), x_w1(8, order), x_w1(10, order)
        c5, c7 = Fraction(5 * w, 72), Fraction(7 * w, 72)
        return [
            (
                x_w1(w, order).derivative(),
                c5 * (x6 * x_w1(w - 4, order)) + c7 * (x8 * x_w1(w - 6, order)),
            ),
            (
                x_w1(w + 2, order).derivative(),
                c5 * (x6 * x_w1(w - 2, order)) + c7 * (x8 * x_w1(w - 4, order)),
            ),
            (
                x_w1(w + 4, order).derivative(),
                240 * (x6 * x_w1(w, order))
                + c7 * (x8 * x_w1(w - 2, order))
                + c5 * (x10 * x_w1(w - 4, order)),
            ),
        ]

    return build


def _ab(w: int) -> Callable[[int], list[Pair]]:
    def build(order: int) -> list[Pair]:
        parts = x_w1_components(w, order)
        e2 = eisenstein(2, order)
        return [(x_w1(w, order), parts.pure + e2 * parts.e2_part)]

    return build


def _br_61(order: int) -> list[Pair]:
    x = x_w1(6, order)
    d, dd = x.derivative(), x.derivative().derivative()
    return [(6 * (d * d) - 5 * (dd * x), delta_series(order) * x_w2(4, order))]


def _br_121(order: int) -> list[Pair]:
    x = x_w1(12, order)
    d, dd = x.derivative(), x.derivative().derivative()
    f = composite_forms(order)["F"]
    return [
        (12 * (d * d) - 11 * (dd * x), Fraction(1, 914457600) * (delta_series(order) * f))
    ]


def _br_141(order: int) -> list[Pair]:
    x = x_w1(14, order)
    d, dd = x.derivative(), x.derivative().derivative()
    delta = delta_series(order)
    return [(14 * (d * d) - 13 * (dd * x), 4 * ((delta * delta) * x_w2(8, order)))]


def _d2_deriv_1(order: int) -> list[Pair]:
    x42, x61, x81 = x_w2(4, order), x_w1(6, order), x_w1(8, order)
    rhs = Fraction(8, 9) * (x42 * x81) + Fraction(10, 9) * (x61 * x61)
    return [(x_w2(10, order).derivative(), rhs)]


def _d2_deriv_2(order: int) -> list[Pair]:
    return [(x_w2(12, order).derivative(), 3 * (x_w1(6, order) * x_w2(8, order)))]


def _d2_deriv_3(order: int) -> list[Pair]:
    return [(x_w2(8, order).derivative(), 2 * (x_w2(4, order) * x_w1(6, order)))]


def _d2_deriv_4(order: int) -> list[Pair]:
    return [(x_w2(14, order).derivative(), 3 * (x_w2(4, order) * x_w1(12, order)))]


def _x121_deriv(order: int) -> list[Pair]:
    return [(x_w1(12, order).derivative(), 2 * (x_w1(6, order) * x_w1(8, order)))]


def _e1_a(order: int) -> list[Pair]:
    e2, e4, e6 = (eisenstein(k, order) for k in (2, 4, 6))
    lhs = -12 * (e2 * e4 * e6) + 5 * (e4 * e4 * e4) + 7 * (e6 * e6)
    return [(lhs, 3991680 * x_w1(12, order))]


def _e1_b(order: int) -> list[Pair]:
    e2, e4, e6 = (eisenstein(k, order) for k in (2, 4, 6))
    rhs = Fraction(11, 3991680) * (
        -(e2 * e2 * e4 * e6) + e2 * (e4 * e4 * e4) + e2 * (e6 * e6) - (e4 * e4) * e6
    )
    return [(x_w1(12, order).derivative(), rhs)]


def _lfact(order: int) -> list[Pair]:
    th = theta_forms(order)
    comp = composite_forms(order)
    h2, h4 = th["H2"], th["H4"]
    factor = (h2**5) * (h4 * h4) * ((h2 + h4) * (h2 + h4))
    return [(comp["L10"], Fraction(105, 8) * (factor * comp["L"]))]


def _lcomb(variant: str) -> Callable[[int], list[Pair]]:
    def build(order: int) -> list[Pair]:
        return [(composite_forms(order)["L"], lcomb_combination(order, variant=variant))]

    return build


def _serre_cross(order: int) -> list[Pair]:
    comp = composite_forms(order)
    f, g = comp["F"], comp["G"]
    lhs = f.derivative() * g - f * g.derivative()
    rhs = serre_derivative(f, 14) * g - f * serre_derivative(g, 14)
    return [(lhs, rhs)]


def _mrb(order: int) -> list[Pair]:
    x61, x121 = x_w1(6, order), x_w1(12, order)
    delta = delta_series(order)
    f = composite_forms(order)["F"]
    return [
        (
            martin_royer_bracket(x61, x61, 2, 6, 1, 6, 1),
            -6 * (delta * x_w2(4, order)),
        ),
        (
            martin_royer_bracket(x121, x121, 2, 12, 1, 12, 1),
            Fraction(-12, 914457600) * (delta * f),
        ),
    ]


def _x42d(order: int) -> list[Pair]:
    delta = delta_series(order)
    lhs = 312 * (x_w2(4, order) * delta)
    return [(lhs, eisenstein(4, order) * delta - delta.derivative().derivative())]


def _xw2_coeff(order: int) -> list[Pair]:
    s3 = sigma_table(order, 3)
    s5 = sigma_table(order, 5)
    s7 = sigma_table(order, 7)
    c8 = [Fraction(n * s5[n] - n * n * s3[n], 30) for n in range(order + 1)]
    c10 = [Fraction(n * s7[n] - n * n * s5[n], 126) for n in range(order + 1)]
    return [
        (x_w2(8, order), FourierSeries.from_coefficients(c8)),
        (x_w2(10, order), FourierSeries.from_coefficients(c10)),
    ]


def _registry() -> dict[str, IdentityCase]:
    cases: list[IdentityCase] = [
        IdentityCase("RAM-1", "12 E2' = E2^2 - E4", DEFAULT_ORDER, _ram_1),
        IdentityCase("RAM-2", "3 E4' = E2 E4 - E6", DEFAULT_ORDER, _ram_2),
        IdentityCase("RAM-3", "2 E6' = E2 E6 - E4^2", DEFAULT_ORDER, _ram_3),
        IdentityCase(
            "DELTA",
            "1728 q prod(1-q^n)^24 = E4^3 - E6^2",
            DEFAULT_ORDER,
            _delta,
        ),
        IdentityCase(
            "E2L2",
            "E2(z/2) + E2((z+1)/2) = 6 E2(z) - 4 E2(2z)",
            DEFAULT_ORDER,
            _e2l2,
        ),
        IdentityCase(
            "LAMBERT-1",
            "X_{8,1} = sum n sigma_5(n) q^n = sum_m m q^m W6(q^m)/(1-q^m)^7",
            DEFAULT_ORDER,
            _lambert_x(8, 6),
        ),
        IdentityCase(
            "LAMBERT-2",
            "X_{10,1} = sum n sigma_7(n) q^n = sum_m m q^m W8(q^m)/(1-q^m)^9",
            DEFAULT_ORDER,
            _lambert_x(10, 8),
        ),
        IdentityCase(
            "LAMBERT-3",
            "X_{6,1} = sum n sigma_3(n) q^n = sum_m m q^m W4(q^m)/(1-q^m)^5",
            DEFAULT_ORDER,
            _lambert_x(6, 4),
        ),
        IdentityCase(
            "LAMBERT-4",
            "E4 - 1 = 240 sum sigma_3(n) q^n = 240 sum_m q^m W3(q^m)/(1-q^m)^4",
            DEFAULT_ORDER,
            _lambert_4,
        ),
        IdentityCase(
            "LAMBERT-5",
            "E2(2z) - E2(z) = 24 sum (sigma_1(n) - sigma_1(n/2)) q^n",
            DEFAULT_ORDER,
            _lambert_5,
        ),
    ]
    for w in range(6, 48, 6):
        cases.append(
            IdentityCase(
                f"GRAB-{w}",
                f"(w+1) X_{{w+2}} = 12(X_w' - ((w-1)/12) E2 X_w); "
                f"X_{{w+4}} = E4 X_w; "
                f"864(w+5) X_{{w+6}} = (w+6)(E4 X_{{w+2}} - E6 X_w)  [w = {w}]",
                DEFAULT_ORDER,
                _grab(w),
            )
        )
    for w in range(12, 54, 6):
        cases.append(
            IdentityCase(
                f"LEE-{w}",
                f"X_w' = (5w/72) X_{{6,1}} X_{{w-4}} + (7w/72) X_{{8,1}} X_{{w-6}} "
                f"and the w+2, w+4 variants  [w = {w}]",
                DEFAULT_ORDER,
                _lee(w),
            )
        )
    for w in range(12, 54, 6):
        cases.append(
            IdentityCase(
                f"AB-{w}",
                f"X_{{w,1}} = A_w + E2 B_{{w-2}}  [w = {w}]",
                DEFAULT_ORDER,
                _ab(w),
            )
        )
    cases += [
        IdentityCase(
            "BR-61",
            "6 (X_{6,1}')^2 - 5 X_{6,1}'' X_{6,1} = Delta X_{4,2}",
            DEFAULT_ORDER,
            _br_61,
        ),
        IdentityCase(
            "BR-121",
            "12 (X_{12,1}')^2 - 11 X_{12,1}'' X_{12,1} = Delta F / 914457600",
            DEFAULT_ORDER,
            _br_121,
        ),
        IdentityCase(
            "BR-141",
            "14 (X_{14,1}')^2 - 13 X_{14,1}'' X_{14,1} = 4 Delta^2 X_{8,2}",
            DEFAULT_ORDER,
            _br_141,
        ),
        IdentityCase(
            "D2-DERIV-1",
            "X_{10,2}' = (8/9) X_{4,2} X_{8,1} + (10/9) X_{6,1}^2",
            DEFAULT_ORDER,
            _d2_deriv_1,
        ),
        IdentityCase(
            "D2-DERIV-2",
            "X_{12,2}' = 3 X_{6,1} X_{8,2}",
            DEFAULT_ORDER,
            _d2_deriv_2,
        ),
        IdentityCase(
            "D2-DERIV-3",
            "X_{8,2}' = 2 X_{4,2} X_{6,1}",
            DEFAULT_ORDER,
            _d2_deriv_3,
        ),
        IdentityCase(
            "D2-DERIV-4",
            "X_{14,2}' = 3 X_{4,2} X_{12,1}",
            DEFAULT_ORDER,
            _d2_deriv_4,
        ),
        IdentityCase(
            "X121-DERIV",
            "X_{12,1}' = 2 X_{6,1} X_{8,1}",
            DEFAULT_ORDER,
            _x121_deriv,
        ),
        IdentityCase(
            "E1-A",
            "-12 E2 E4 E6 + 5 E4^3 + 7 E6^2 = 3991680 X_{12,1}",
            DEFAULT_ORDER,
            _e1_a,
        ),
        IdentityCase(
            "E1-B",
            "X_{12,1}' = (11/3991680)(-E2^2 E4 E6 + E2 E4^3 + E2 E6^2 - E4^2 E6)",
            DEFAULT_ORDER,
            _e1_b,
        ),
        IdentityCase(
            "LFACT",
            "F'G - FG' = (105/8) H2^5 H4^2 (H2+H4)^2 L",
            60,
            _lfact,
        ),
        IdentityCase(
            "LCOMB-A",
            "L = a1 X_{8,2}(2z) A B + a2 Xt_{8,2} A B + a3 X_{10,2}(2z) A "
            "+ a4 Xt_{10,2} A + a5 X_{12,2}(2z) B + a6 Xt_{12,2} B",
            DEFAULT_ORDER,
            _lcomb("A"),
        ),
        IdentityCase(
            "LCOMB-APRIME",
            "L = a1' X_{8,2}(2z) A B + a2' Y_{8,2} A B + a3' X_{10,2}(2z) A "
            "+ a4' Y_{10,2} A + a5' X_{12,2}(2z) B + a6' Y_{12,2} B",
            DEFAULT_ORDER,
            _lcomb("APRIME"),
        ),
        IdentityCase(
            "SERRE-CROSS",
            "F'G - FG' = (serre_14 F) G - F (serre_14 G)",
            DEFAULT_ORDER,
            _serre_cross,
        ),
        IdentityCase(
            "MRB",
            "bracket(X_{6,1}, X_{6,1}) = -6 Delta X_{4,2}; "
            "bracket(X_{12,1}, X_{12,1}) = -12 Delta F / 914457600",
            DEFAULT_ORDER,
            _mrb,
        ),
        IdentityCase(
            "X42D",
            "312 X_{4,2} Delta = E4 Delta - Delta''",
            DEFAULT_ORDER,
            _x42d,
        ),
        IdentityCase(
            "XW2-COEFF",
            "X_{8,2} = sum (n sigma_5 - n^2 sigma_3)/30 q^n; "
            "X_{10,2} = sum (n sigma_7 - n^2 sigma_5)/126 q^n",
            DEFAULT_ORDER,
            _xw2_coeff,
        ),
    ]
    return {case.ident: case for case in cases}


_REGISTRY = _registry()


def registry() -> dict[str, IdentityCase]:
    """A copy of the full identity registry, keyed by id."""
    return dict(_REGISTRY)


def identity_ids() -> list[str]:
    return sorted(_REGISTRY)


def _check_case(case: IdentityCase, order: int) -> IdentityResult:
    start = time.perf_counter()
    for lhs, rhs in case.build(order):
        through = min(Fraction(order), lhs.order, rhs.order)
        diff = lhs.first_difference(rhs, through)
        if diff is not None:
            exponent, left, right = diff
            return IdentityResult(
                ident=case.ident,
                status="fail",
                order=order,
                first_bad_exponent=exponent,
                residual=left - right,
                elapsed=time.perf_counter() - start,
            )
    return IdentityResult(
        ident=case.ident,
        status="pass",
        order=order,
        first_bad_exponent=None,
        residual=None,
        elapsed=time.perf_counter() - start,
    )


def verify(ident: str, order: int | None = None) -> IdentityResult:
    """Check one registry entry, at its default order unless overridden."""
    if ident not in _REGISTRY:
        raise UnknownIdentity(ident)
    case = _REGISTRY[ident]
    return _check_case(case, case.default_order if order is None else int(order))


def verify_all(
    order: int | None = None,
    only: Iterable[str] | None = None,
) -> list[IdentityResult]:
    """Check the whole registry (or a filtered subset), sorted by id.

    ``order=None`` uses each entry's default; an explicit order applies to
    every entry.  Failures are reported in the results, never raised.
    """
    idents = identity_ids() if only is None else sorted(only)
    results = []
    for ident in idents:
        results.append(verify(ident, order))
    return results
