"""Classical generators and derivations.

Everything here is an exact truncated expansion (:class:`FourierSeries`).
Weight-k Eisenstein series are normalized to constant term 1; the
discriminant comes from the sparse cube of the eta-product, raised to the
eighth power by integer convolution, which keeps tables to order 10^5 cheap.
"""

from __future__ import annotations

import functools
import math
import threading
from fractions import Fraction

from .qseries import FourierSeries, _intconv

DEFAULT_ORDER = 120


class OrderExceeded(ValueError):
    """A coefficient beyond the configured table cap was requested."""


class ParameterRange(ValueError):
    """Bracket or weight parameters outside the supported range."""


# ---------------------------------------------------------------------------
# divisor sums and representation numbers
# ---------------------------------------------------------------------------


def sigma(n: int, k: int) -> int:
    """sigma_k(n) by direct divisor enumeration (exact, no sieve)."""
    if n < 1:
        raise ValueError("sigma is defined for n >= 1")
    total = 0
    i = 1
    while i * i <= n:
        if n % i == 0:
            total += i**k
            j = n // i
            if j != i:
                total += j**k
        i += 1
    return total


def sigma_table(limit: int, k: int) -> list[int]:
    """[0, sigma_k(1), ..., sigma_k(limit)] by sieving multiples."""
    out = [0] * (limit + 1)
    for d in range(1, limit + 1):
        dk = d**k
        for m in range(d, limit + 1, d):
            out[m] += dk
    return out


def r4(n: int) -> int:
    """Number of representations of n as an ordered sum of four squares.

    Classical closed form: 8 times the sum of divisors of n not divisible
    by 4 (and r4(0) = 1).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1
    total = 0
    i = 1
    while i * i <= n:
        if n % i == 0:
            if i % 4:
                total += i
            j = n // i
            if j != i and j % 4:
                total += j
        i += 1
    return 8 * total


def r4_table(limit: int) -> list[int]:
    out = [0] * (limit + 1)
    out[0] = 1
    for d in range(1, limit + 1):
        if d % 4 == 0:
            continue
        inc = 8 * d
        for m in range(d, limit + 1, d):
            out[m] += inc
    return out


# ---------------------------------------------------------------------------
# the discriminant and its coefficients
# ---------------------------------------------------------------------------

TAU_DEFAULT_CAP = 2_000_000

_tau_lock = threading.Lock()
_tau_cache: list[int] = []


def _eta_cube_ints(limit: int) -> list[int]:
    """Coefficients of prod(1-q^n)^3 = sum_{j>=0} (-1)^j (2j+1) q^(j(j+1)/2)."""
    out = [0] * (limit + 1)
    j = 0
    while j * (j + 1) // 2 <= limit:
        out[j * (j + 1) // 2] = (2 * j + 1) * (1 if j % 2 == 0 else -1)
        j += 1
    return out


def _tau_ints(limit: int) -> list[int]:
    """[0, tau(1), ..., tau(limit)] via the eighth power of the sparse cube."""
    if limit < 1:
        return [0] * (limit + 1)
    p = _eta_cube_ints(limit - 1)
    for _ in range(3):  # p -> p^2 -> p^4 -> p^8, truncated at limit-1
        p = _intconv(p, p, limit - 1)
    return [0] + p[:limit]


def tau(n: int, *, cap: int = TAU_DEFAULT_CAP) -> int:
    """The discriminant coefficient tau(n), from a lazily grown shared table.

    Raises OrderExceeded for n beyond ``cap`` so accidental unbounded table
    growth fails loudly instead of thrashing.
    """
    if n < 1:
        raise ValueError("tau is defined for n >= 1")
    if n > cap:
        raise OrderExceeded(f"tau({n}) requested but the cap is {cap}")
    global _tau_cache
    if n >= len(_tau_cache):
        with _tau_lock:
            if n >= len(_tau_cache):  # re-check under the lock
                size = max(2 * len(_tau_cache), 1 << max(8, n.bit_length()))
                _tau_cache = _tau_ints(min(size, cap))
    return _tau_cache[n]


def delta_series(order: int) -> FourierSeries:
    """q * prod(1-q^n)^24, exact to the given order."""
    return FourierSeries.from_coefficients(_tau_ints(order))


# ---------------------------------------------------------------------------
# Eisenstein series
# ---------------------------------------------------------------------------

_EIS_PARAMS = {2: (1, -24), 4: (3, 240), 6: (5, -504), 8: (7, 480), 10: (9, -264)}


@functools.lru_cache(maxsize=64)
def eisenstein(k: int, order: int = DEFAULT_ORDER) -> FourierSeries:
    """Weight-k Eisenstein series, constant term 1, for k in {2,4,6,8,10}."""
    if k not in _EIS_PARAMS:
        raise ParameterRange(f"eisenstein weight must be one of {sorted(_EIS_PARAMS)}")
    power, mult = _EIS_PARAMS[k]
    sig = sigma_table(order, power)
    coeffs = [1] + [mult * sig[n] for n in range(1, order + 1)]
    return FourierSeries.from_coefficients(coeffs)


def serre_derivative(f: FourierSeries, weight) -> FourierSeries:
    """The weight-raising derivation: f' - (weight/12) E2 f.

    ``f'`` is q d/dq.  For a weight-w form the result has weight w+2 and is
    again a form (the E2 term cancels the quasimodular defect).
    """
    w = Fraction(weight)
    e2 = eisenstein(2, int(math.ceil(f.order)))
    return f.derivative() - (e2 * f).scale(w / 12)


def martin_royer_bracket(
    f: FourierSeries,
    g: FourierSeries,
    n: int,
    k: int,
    s: int,
    l: int,
    t: int,
) -> FourierSeries:
    """Bilinear bracket of order n for inputs of weights k, l and depths s, t:

        sum_{r=0}^{n} (-1)^r C(k-s+n-1, n-r) C(l-t+n-1, r) (D^r f)(D^{n-r} g)

    where D = q d/dq.  The parameter combinations must keep both binomial
    tops nonnegative.
    """
    for name, val in (("n", n), ("k", k), ("s", s), ("l", l), ("t", t)):
        if not isinstance(val, int):
            raise ParameterRange(f"bracket parameter {name} must be an integer")
    if n < 0 or k - s + n - 1 < 0 or l - t + n - 1 < 0:
        raise ParameterRange(
            f"bracket needs n >= 0 and k-s+n-1, l-t+n-1 >= 0 "
            f"(got n={n}, k-s+n-1={k - s + n - 1}, l-t+n-1={l - t + n - 1})"
        )
    df = [f]
    dg = [g]
    for _ in range(n):
        df.append(df[-1].derivative())
        dg.append(dg[-1].derivative())
    total = None
    for r in range(n + 1):
        c = math.comb(k - s + n - 1, n - r) * math.comb(l - t + n - 1, r)
        if c == 0:
            continue
        term = (df[r] * dg[n - r]).scale(Fraction(-c if r % 2 else c))
        total = term if total is None else total + term
    if total is None:
        # all binomials vanished; the bracket is identically zero
        m = min(f.order, g.order)
        return FourierSeries.zero(int(m), 1)
    return total


# ---------------------------------------------------------------------------
# theta-type level-2 forms (half-integer exponents, grain 2)
# ---------------------------------------------------------------------------


def theta_forms(order: int = DEFAULT_ORDER) -> dict[str, FourierSeries]:
    """The four weight-2 building blocks on the theta side.

    H2 = 2 * sum over odd n of r4(n) q^(n/2)
    H4 = sum over n >= 0 of (-1)^n r4(n) q^(n/2)        (constant term 1)
    A  = H2^2
    B  = H2 + 2 H4 = 2 (1 + sum r4(2n) q^n)

    All are grain-2 series truncated at absolute order ``order``.
    """
    return dict(_theta_forms_cached(order))


@functools.lru_cache(maxsize=8)
def _theta_forms_cached(order: int) -> dict[str, FourierSeries]:
    limit = 2 * order
    table = r4_table(limit)
    h2 = [0] * (limit + 1)
    h4 = [0] * (limit + 1)
    for n in range(limit + 1):
        if n % 2:
            h2[n] = 2 * table[n]
            h4[n] = -table[n]
        else:
            h4[n] = table[n]
    H2 = FourierSeries.from_coefficients(h2, grain=2)
    H4 = FourierSeries.from_coefficients(h4, grain=2)
    return {"H2": H2, "H4": H4, "A": H2 * H2, "B": H2 + H4.scale(2)}


def e2_half_arguments(order: int = DEFAULT_ORDER) -> tuple[FourierSeries, FourierSeries]:
    """E2 at z/2 and at (z+1)/2, as grain-2 expansions.

    E2(z/2) = 1 - 24 sum sigma_1(n) q^(n/2); the shifted variant picks up
    (-1)^n on the q^(n/2) coefficient.
    """
    limit = 2 * order
    sig = sigma_table(limit, 1)
    plain = [0] * (limit + 1)
    shifted = [0] * (limit + 1)
    plain[0] = shifted[0] = 1
    for n in range(1, limit + 1):
        plain[n] = -24 * sig[n]
        shifted[n] = -24 * sig[n] * (1 if n % 2 == 0 else -1)
    return (
        FourierSeries.from_coefficients(plain, grain=2),
        FourierSeries.from_coefficients(shifted, grain=2),
    )


# ---------------------------------------------------------------------------
# composite forms built from E2/E4/E6 and the theta blocks
# ---------------------------------------------------------------------------


def composite_forms(order: int = DEFAULT_ORDER) -> dict[str, FourierSeries]:
    """Named composite forms used by the identity registry and the CLI.

    F    weight-14 depth-2 combination of E2, E4, E6 vanishing to order 3
    G    weight-14 theta-side product vanishing to order 5/2
    K10, K12, K14   weight 10/12/14 theta-side coefficient forms
    L    K10 E2^2 + K12 E2 + K14 (weight 14, constant term 0)
    L10  F'G - FG'   (weight 30 combination; equals the Serre-bracket cross;
         also listed under the alias key script_L10)
    P1   X(4,2)-type difference  sum n(sigma1(n) - 4 sigma1(n/2)) q^n
    P2   (-E2(z) + 5 E2(2z) - 4 E2(4z)) / 24
    P3   depth-1 difference      sum n(sigma3(n) - 16 sigma3(n/2)) q^n
    P4   weight-12 depth-1 difference with dilation factor 2^11
    X42Delta   product of the weight-4 depth-2 form with the discriminant

    The P1/P3/P4/X42Delta entries are built here from Eisenstein closed
    forms; the label resolver builds the same series through the
    maximal-vanishing recurrences, giving an independent cross-check.
    """
    return dict(_composite_forms_cached(order))


@functools.lru_cache(maxsize=8)
def _composite_forms_cached(order: int) -> dict[str, FourierSeries]:
    e2 = eisenstein(2, order)
    e4 = eisenstein(4, order)
    e6 = eisenstein(6, order)
    e2sq = e2 * e2
    e4sq = e4 * e4
    e4cb = e4sq * e4
    e6sq = e6 * e6
    F = (
        (e2sq * e4cb).scale(49)
        - (e2sq * e6sq).scale(25)
        - (e2 * e4sq * e6).scale(48)
        - (e4sq * e4sq).scale(25)
        + (e4 * e6sq).scale(49)
    )

    th = theta_forms(order)
    H2, H4 = th["H2"], th["H4"]
    p2 = [H2]
    for _ in range(6):
        p2.append(p2[-1] * H2)  # H2^2 .. H2^7
    p4 = [H4]
    for _ in range(5):
        p4.append(p4[-1] * H4)

    def mono(i: int, j: int) -> FourierSeries:
        # H2^i H4^j (i or j may be 0)
        if i == 0:
            return p4[j - 1]
        if j == 0:
            return p2[i - 1]
        return p2[i - 1] * p4[j - 1]

    G = p2[4] * (p2[1].scale(2) + (H2 * H4).scale(7) + p4[1].scale(7))

    K10 = (
        mono(4, 0).scale(23)
        + mono(3, 1).scale(46)
        + mono(2, 2).scale(54)
        + mono(1, 3).scale(16)
        + mono(0, 4).scale(8)
    ).scale(-2) * (H2 + H4.scale(2))
    K12 = (
        mono(4, 0).scale(10)
        + mono(3, 1).scale(35)
        + mono(2, 2).scale(3)
        - mono(1, 3).scale(64)
        - mono(0, 4).scale(32)
    ).scale(-2) * (mono(2, 0) + mono(1, 1) + mono(0, 2))
    K14 = (
        mono(6, 0).scale(26)
        + mono(5, 1).scale(78)
        + mono(4, 2).scale(177)
        + mono(3, 3).scale(182)
        + mono(2, 4).scale(51)
        - mono(1, 5).scale(48)
        - mono(0, 6).scale(16)
    ) * (H2 + H4.scale(2))

    L = K10 * e2sq + K12 * e2 + K14
    L10 = F.derivative() * G - F * G.derivative()

    P2 = (
        -e2 + e2.dilate(2).scale(5) - e2.dilate(4).scale(4)
    ).scale(Fraction(1, 24))

    x42 = e2.derivative().scale(Fraction(-1, 24))
    x61 = e4.derivative().scale(Fraction(1, 240))
    x121 = (
        e4cb.scale(5) + e6sq.scale(7) - (e2 * e4 * e6).scale(12)
    ).scale(Fraction(1, 3991680))
    P1 = x42 - x42.dilate(2).scale(8)
    P3 = x61 - x61.dilate(2).scale(32)
    P4 = x121 - x121.dilate(2).scale(2**11)

    return {
        "F": F,
        "G": G,
        "K10": K10,
        "K12": K12,
        "K14": K14,
        "L": L,
        "L10": L10,
        "script_L10": L10,
        "P1": P1,
        "P2": P2,
        "P3": P3,
        "P4": P4,
        "X42Delta": x42 * delta_series(order),
    }
