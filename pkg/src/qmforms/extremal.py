"""Maximal-vanishing quasimodular families and level-2 difference forms.

Depth 1: for even weight w >= 6 there is a unique (normalized) quasimodular
form of weight w and depth 1 whose expansion vanishes to the largest order
possible; the family is generated from the weight-6 seed by three
weight-climbing recurrences (one per residue of w mod 6).

Every depth-1 member splits as  X_w = A_w + E2 * B_{w-2}  with A and B free
of E2.  The same three recurrences descend to the components, which is how
the component tables (and their leading-coefficient laws) are produced here
independently of the full series.

Depth 2: explicit weights 4, 8, 10, 12, 14 plus a general exact solver that
finds the maximal-vanishing combination in the graded space spanned by
E2^j E4^a E6^b (j <= 2); weight 16 is produced by the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import forms
from .forms import DEFAULT_ORDER, delta_series, eisenstein, serre_derivative
from .qseries import FourierSeries

F = Fraction


class BadWeight(ValueError):
    """Weight outside the family's supported range."""


def _require_even(w: int, minimum: int):
    if not isinstance(w, int) or w % 2 or w < minimum:
        raise BadWeight(f"weight must be an even integer >= {minimum}, got {w}")


def a_w_exponent(w: int) -> int:
    """The slowest-decay exponent for the depth-1 family: w - ceil(w/6)."""
    _require_even(w, 4)
    return w - (-(-w // 6))


def alpha_w0(w: int) -> Fraction:
    """Closed form for the constant term of the E2-free component, 6 | w."""
    if w % 6 or w < 6:
        raise BadWeight("the closed form applies to weights divisible by 6")
    k = w // 6
    sign = -1 if k % 2 else 1
    num = math.factorial(k) * math.factorial(2 * k) * math.factorial(3 * k)
    return F(sign * num, 2 * w * math.factorial(w))


# ---------------------------------------------------------------------------
# depth 1: full series
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def x_w1(w: int, order: int = DEFAULT_ORDER) -> FourierSeries:
    """The normalized depth-1 maximal-vanishing form of even weight w >= 6."""
    _require_even(w, 6)
    if w == 6:
        e2 = eisenstein(2, order)
        e4 = eisenstein(4, order)
        e6 = eisenstein(6, order)
        return (e2 * e4 - e6).scale(F(1, 720))
    r = w % 6
    if r == 2:  # climb by +2 from the previous multiple of 6
        prev = x_w1(w - 2, order)
        return serre_derivative(prev, w - 3).scale(F(12, w - 1))
    if r == 4:  # climb by +4: multiply by E4
        return eisenstein(4, order) * x_w1(w - 4, order)
    # r == 0, w >= 12: climb by +6
    e4 = eisenstein(4, order)
    e6 = eisenstein(6, order)
    combo = e4 * x_w1(w - 4, order) - e6 * x_w1(w - 6, order)
    return combo.scale(F(w, 864 * (w - 1)))


# ---------------------------------------------------------------------------
# depth 1: E2-free component pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Depth1Components:
    """X = pure + E2 * e2_part, both components free of E2.

    ``pure`` has the weight of X, ``e2_part`` has weight - 2.
    """

    weight: int
    pure: FourierSeries
    e2_part: FourierSeries

    def recompose(self) -> FourierSeries:
        order = int(min(self.pure.order, self.e2_part.order))
        e2 = eisenstein(2, order)
        return self.pure + e2 * self.e2_part


@lru_cache(maxsize=None)
def x_w1_components(w: int, order: int = DEFAULT_ORDER) -> Depth1Components:
    """Component pair of x_w1(w), built by the component recurrences.

    The +2 recurrence acts on components as

        pure_{w}    = (12/(w-1)) ( S_{w-2} pure_{w-2} - (1/12) E4 e2part_{w-2} )
        e2part_{w}  = (12/(w-1)) ( (1/12) pure_{w-2} + S_{w-4} e2part_{w-2} )

    with S_k the weight-k Serre derivative; the +4 and +6 recurrences act
    term by term.  This never touches E2, so it is an independent route to
    the same forms (the recomposition identity is checked in the registry).
    """
    _require_even(w, 6)
    if w == 6:
        e4 = eisenstein(4, order)
        e6 = eisenstein(6, order)
        return Depth1Components(6, e6.scale(F(-1, 720)), e4.scale(F(1, 720)))
    r = w % 6
    if r == 2:
        prev = x_w1_components(w - 2, order)
        e4 = eisenstein(4, order)
        s = F(12, w - 1)
        pure = (
            serre_derivative(prev.pure, w - 2) - (e4 * prev.e2_part).scale(F(1, 12))
        ).scale(s)
        e2part = (
            prev.pure.scale(F(1, 12)) + serre_derivative(prev.e2_part, w - 4)
        ).scale(s)
        return Depth1Components(w, pure, e2part)
    if r == 4:
        prev = x_w1_components(w - 4, order)
        e4 = eisenstein(4, order)
        return Depth1Components(w, e4 * prev.pure, e4 * prev.e2_part)
    prev4 = x_w1_components(w - 4, order)
    prev6 = x_w1_components(w - 6, order)
    e4 = eisenstein(4, order)
    e6 = eisenstein(6, order)
    s = F(w, 864 * (w - 1))
    return Depth1Components(
        w,
        (e4 * prev4.pure - e6 * prev6.pure).scale(s),
        (e4 * prev4.e2_part - e6 * prev6.e2_part).scale(s),
    )


def component_constant(w: int, which: str = "pure") -> Fraction:
    """Constant term of the pure / e2_part component of x_w1(w)."""
    c = x_w1_components(w, 2)
    return (c.pure if which == "pure" else c.e2_part).coefficient(0)


# ---------------------------------------------------------------------------
# depth 2
# ---------------------------------------------------------------------------


def _antiderivative(f: FourierSeries) -> FourierSeries:
    """Inverse of q d/dq with zero constant term (requires none present)."""
    if f.coefficient(0) != 0:
        raise ValueError("cannot antidifferentiate a nonzero constant term")
    g = f.grain
    return FourierSeries(
        g,
        tuple(
            c * F(g, k) if k else F(0) for k, c in enumerate(f.coeffs)
        ),
    )


_X_W2_WEIGHTS = (4, 8, 10, 12, 14, 16)


@lru_cache(maxsize=None)
def x_w2(w: int, order: int = DEFAULT_ORDER) -> FourierSeries:
    """Depth-2 maximal-vanishing forms at weights 4, 8, 10, 12, 14, 16.

    Weights up to 12 come from closed derivative combinations of Eisenstein
    series, weight 14 from exact antidifferentiation of its derivative
    identity, weight 16 from the exact linear-algebra solver.
    """
    if w not in _X_W2_WEIGHTS:
        raise BadWeight(f"depth-2 family implemented for weights {_X_W2_WEIGHTS}")
    if w == 4:
        return eisenstein(2, order).derivative().scale(F(-1, 24))
    if w == 8:
        e4 = eisenstein(4, order)
        e6 = eisenstein(6, order)
        return (
            e6.derivative().scale(F(-1, 15120))
            - e4.derivative().derivative().scale(F(1, 7200))
        )
    if w == 10:
        e4 = eisenstein(4, order)
        e6 = eisenstein(6, order)
        return (e4 * e4).derivative().scale(F(1, 60480)) + e6.derivative().derivative().scale(
            F(1, 63504)
        )
    if w == 12:
        e8 = eisenstein(8, order)
        e10 = eisenstein(10, order)
        d = delta_series(order)
        inner = (
            d.scale(F(17, 21))
            - e10.derivative().scale(F(1, 308))
            - e8.derivative().derivative().scale(F(1, 288))
        )
        return inner.scale(F(1, 18000))
    if w == 14:
        prod = x_w2(4, order) * x_w1(12, order)
        return _antiderivative(prod.scale(3))
    return extremal_depth2(16, order)


def _depth2_monomials(w: int) -> list[tuple[int, int, int]]:
    """Exponent triples (j, a, b) with E2^j E4^a E6^b of weight w, j <= 2."""
    out = []
    for j in range(3):
        rest = w - 2 * j
        if rest < 0:
            continue
        for b in range(rest // 6 + 1):
            rem = rest - 6 * b
            if rem % 4 == 0:
                out.append((j, rem // 4, b))
    return out


def _monomial_series(j: int, a: int, b: int, order: int) -> FourierSeries:
    s = FourierSeries.one(order)
    if j:
        s = s * eisenstein(2, order) ** j
    if a:
        s = s * eisenstein(4, order) ** a
    if b:
        s = s * eisenstein(6, order) ** b
    return s


def extremal_depth2(w: int, order: int = DEFAULT_ORDER) -> FourierSeries:
    """Exact maximal-vanishing combination in the depth<=2 space of weight w.

    Solves the square linear system that kills the first dim-1 coefficients
    and normalizes the next one to 1.  Raises BadWeight if the space is
    empty or the system is singular (no unique extremal form).
    """
    _require_even(w, 4)
    monos = _depth2_monomials(w)
    dim = len(monos)
    if dim == 0:
        raise BadWeight(f"no depth<=2 forms of weight {w}")
    v = dim - 1
    cols = [_monomial_series(j, a, b, v) for (j, a, b) in monos]
    # rows: coefficient of q^n for n = 0..v; rhs = e_v
    mat = [[cols[i].coefficient(n) for i in range(dim)] for n in range(v + 1)]
    rhs = [F(0)] * v + [F(1)]
    sol = _solve_exact(mat, rhs)
    if sol is None:
        raise BadWeight(f"no unique maximal-vanishing combination at weight {w}")
    full = FourierSeries.zero(order)
    for coef, (j, a, b) in zip(sol, monos):
        if coef:
            full = full + _monomial_series(j, a, b, order).scale(coef)
    return full


def _solve_exact(mat: list[list[Fraction]], rhs: list[Fraction]):
    """Gaussian elimination over Fractions; None if singular."""
    n = len(mat)
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


# ---------------------------------------------------------------------------
# level-2 difference families
# ---------------------------------------------------------------------------


def y_form(w: int, order: int = DEFAULT_ORDER) -> FourierSeries:
    """X_{w,2}(z) - 2^(w-2) X_{w,2}(2z); completely positive for these w."""
    x = x_w2(w, order)
    return x - x.dilate(2).scale(2 ** (w - 2))


def xtilde_form(w: int, order: int = DEFAULT_ORDER) -> FourierSeries:
    """X_{w,2}(z) - 2^(w-1) X_{w,2}(2z); the alternating-sign variant."""
    x = x_w2(w, order)
    return x - x.dilate(2).scale(2 ** (w - 1))


def weak_family(w: int, n: int, order: int = DEFAULT_ORDER) -> FourierSeries:
    """X_{w,1}(z) - n^(a_w) X_{w,1}(nz) with the slow-decay exponent a_w."""
    if n < 2:
        raise ValueError("dilation must be at least 2")
    x = x_w1(w, order)
    return x - x.dilate(n).scale(n ** a_w_exponent(w))


def level2_families(w: int, order: int = DEFAULT_ORDER, n: int = 2) -> dict:
    """The three difference families at weight w (where each is defined)."""
    out = {}
    if w in _X_W2_WEIGHTS:
        out["Y"] = y_form(w, order)
        out["Xtilde"] = xtilde_form(w, order)
    if w >= 6 and w % 2 == 0:
        out["weak"] = weak_family(w, n, order)
    if not out:
        raise BadWeight(f"no level-2 families at weight {w}")
    return out


# ---------------------------------------------------------------------------
# label registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FormDescriptor:
    label: str
    weight: int
    depth: int
    group: str
    summary: str


def _p1(order):
    return xtilde_form(4, order)


def _p3(order):
    return weak_family(6, 2, order)


def _p4(order):
    x = x_w1(12, order)
    return x - x.dilate(2).scale(2**11)


def _x42delta(order):
    return x_w2(4, order) * delta_series(order)


_FIXED_BUILDERS = {
    "E2": lambda order: eisenstein(2, order),
    "E4": lambda order: eisenstein(4, order),
    "E6": lambda order: eisenstein(6, order),
    "E8": lambda order: eisenstein(8, order),
    "E10": lambda order: eisenstein(10, order),
    "Delta": delta_series,
    "P1": _p1,
    "P3": _p3,
    "P4": _p4,
    "X42Delta": _x42delta,
}

_THETA_LABELS = ("H2", "H4", "A", "B")
_COMPOSITE_LABELS = ("F", "G", "K10", "K12", "K14", "L", "L10", "script_L10", "P2")


def form_by_label(label: str, order: int = DEFAULT_ORDER) -> FourierSeries:
    """Build the form named by a CLI-style label.

    Patterns: E2..E10, Delta, X{w}_1, X{w}_2, Y{w}_2, Xtilde{w}_2, theta
    blocks H2/H4/A/B, composites F/G/K10/K12/K14/L/L10, P1..P4, X42Delta.
    Raises KeyError for unknown labels, BadWeight for bad weights.
    """
    if label in _FIXED_BUILDERS:
        return _FIXED_BUILDERS[label](order)
    if label in _THETA_LABELS:
        return forms.theta_forms(order)[label]
    if label in _COMPOSITE_LABELS:
        return forms.composite_forms(order)[label]
    body = None
    for prefix, builder in (
        ("Xtilde", lambda w, o: xtilde_form(w, o)),
        ("X", None),
        ("Y", lambda w, o: y_form(w, o)),
    ):
        if label.startswith(prefix):
            body = label[len(prefix) :]
            if prefix == "X":
                if body.endswith("_1"):
                    return x_w1(int(body[:-2]), order)
                if body.endswith("_2"):
                    return x_w2(int(body[:-2]), order)
                break
            if body.endswith("_2"):
                return builder(int(body[:-2]), order)
            break
    raise KeyError(f"unknown form label: {label!r}")


def known_labels(max_depth1_weight: int = 48) -> list[str]:
    out = list(_FIXED_BUILDERS) + list(_THETA_LABELS) + list(_COMPOSITE_LABELS)
    out += [f"X{w}_1" for w in range(6, max_depth1_weight + 1, 2)]
    out += [f"X{w}_2" for w in _X_W2_WEIGHTS]
    out += [f"Y{w}_2" for w in _X_W2_WEIGHTS]
    out += [f"Xtilde{w}_2" for w in _X_W2_WEIGHTS]
    return sorted(out)


def describe_label(label: str) -> FormDescriptor:
    """Metadata for a label (weight / depth / group tag, human summary)."""
    fixed = {
        "E2": (2, 1, "SL(2,Z)", "weight-2 Eisenstein series (quasimodular)"),
        "E4": (4, 0, "SL(2,Z)", "weight-4 Eisenstein series"),
        "E6": (6, 0, "SL(2,Z)", "weight-6 Eisenstein series"),
        "E8": (8, 0, "SL(2,Z)", "weight-8 Eisenstein series"),
        "E10": (10, 0, "SL(2,Z)", "weight-10 Eisenstein series"),
        "Delta": (12, 0, "SL(2,Z)", "the discriminant cusp form"),
        "H2": (2, 0, "Gamma0(4)", "odd-index four-squares theta block"),
        "H4": (2, 0, "Gamma0(4)", "sign-alternating four-squares theta block"),
        "A": (4, 0, "Gamma0(4)", "square of the odd theta block"),
        "B": (2, 0, "Gamma0(4)", "even-index four-squares combination"),
        "F": (14, 2, "SL(2,Z)", "weight-14 depth-2 combination vanishing to order 3"),
        "G": (14, 0, "Gamma0(4)", "theta-side weight-14 product"),
        "K10": (10, 0, "Gamma0(4)", "theta-side weight-10 coefficient form"),
        "K12": (12, 0, "Gamma0(4)", "theta-side weight-12 coefficient form"),
        "K14": (14, 0, "Gamma0(4)", "theta-side weight-14 coefficient form"),
        "L": (14, 2, "Gamma0(4)", "K10 E2^2 + K12 E2 + K14"),
        "L10": (30, 3, "Gamma0(4)", "cross combination F'G - FG'"),
        "script_L10": (30, 3, "Gamma0(4)", "cross combination F'G - FG'"),
        "P1": (4, 2, "Gamma0(2)", "depth-2 weight-4 difference, alternating signs"),
        "P2": (2, 1, "Gamma0(4)", "three-level E2 combination"),
        "P3": (6, 1, "Gamma0(2)", "depth-1 weight-6 difference, alternating signs"),
        "P4": (12, 1, "Gamma0(2)", "depth-1 weight-12 difference"),
        "X42Delta": (16, 2, "SL(2,Z)", "weight-4 depth-2 form times the discriminant"),
    }
    if label in fixed:
        w, d, g, s = fixed[label]
        return FormDescriptor(label, w, d, g, s)
    if label.startswith("Xtilde") and label.endswith("_2"):
        w = int(label[6:-2])
        return FormDescriptor(label, w, 2, "Gamma0(2)", "difference with factor 2^(w-1)")
    if label.startswith("X") and label.endswith("_1"):
        w = int(label[1:-2])
        return FormDescriptor(label, w, 1, "SL(2,Z)", "depth-1 maximal-vanishing form")
    if label.startswith("X") and label.endswith("_2"):
        w = int(label[1:-2])
        return FormDescriptor(label, w, 2, "SL(2,Z)", "depth-2 maximal-vanishing form")
    if label.startswith("Y") and label.endswith("_2"):
        w = int(label[1:-2])
        return FormDescriptor(label, w, 2, "Gamma0(2)", "difference with factor 2^(w-2)")
    raise KeyError(f"unknown form label: {label!r}")
