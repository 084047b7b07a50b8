"""Outward-rounded interval arithmetic and certified residual enclosures.

Every operation returns an interval guaranteed to contain the true image of
its operand intervals.  Outward rounding is realized by nudging endpoints
with nextafter instead of switching the FPU rounding mode, so evaluation is
pure, thread-safe and bit-deterministic:

  * exact additions/subtractions (detected with an error-free 2Sum) keep
    their endpoints, inexact ones are widened by one ulp;
  * multiplication, division and sqrt are widened by one ulp (sqrt is
    correctly rounded, products are within half an ulp);
  * sin, cos and atan2 are widened by four ulps to cover libm error.

The containment-fuzz tests are the contract for these widths, not the
mechanism itself.

Endpoints may be scalars or same-shape numpy arrays; a batch of boxes is
just an Interval with array endpoints, which is what the branch-and-bound
certifier feeds through `residual_enclosure`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_TRANS_ULPS = 4  # outward ulps after sin/cos/atan2

# Tiny negative lower bounds from roundoff are clamped to zero before sqrt;
# anything below this is a genuine domain error.
_SQRT_CLAMP = -1e-14

# Conservative slop (in periods) when testing whether a box reaches a
# sin/cos extremum; including an extremum needlessly only widens the result.
_EXTREMUM_SLOP = 1e-9


class IntervalError(ArithmeticError):
    """Invalid interval operation."""


class DivisionByZeroInterval(IntervalError):
    """Divisor interval contains zero."""


class NegativeSqrtDomain(IntervalError):
    """sqrt of an interval extending below the roundoff clamp."""


class IndeterminateRegion(IntervalError):
    """Box produced a degenerate geometric quantity (length touching 0)."""


def _down(x, ulps: int = 1):
    for _ in range(ulps):
        x = np.nextafter(x, -np.inf)
    return x


def _up(x, ulps: int = 1):
    for _ in range(ulps):
        x = np.nextafter(x, np.inf)
    return x


def _sum_with_exact_flag(a, b):
    # 2Sum: err is the exact rounding error of a + b, so err == 0 detects
    # exact sums without branching.
    s = a + b
    bv = s - a
    av = s - bv
    err = (b - bv) + (a - av)
    return s, err == 0


@dataclass(frozen=True, eq=False)
class Interval:
    """Closed interval [lo, hi]; endpoints are floats or numpy arrays."""

    lo: object
    hi: object

    # -- constructors -----------------------------------------------------

    @staticmethod
    def point(x) -> "Interval":
        x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
        return Interval(x, x)

    @staticmethod
    def from_endpoints(lo, hi) -> "Interval":
        lo = np.asarray(lo, dtype=float) if np.ndim(lo) else float(lo)
        hi = np.asarray(hi, dtype=float) if np.ndim(hi) else float(hi)
        if np.any(lo > hi):
            raise IntervalError("lower endpoint above upper endpoint")
        return Interval(lo, hi)

    # -- queries ----------------------------------------------------------

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, x):
        return (self.lo <= x) & (x <= self.hi)

    def subset_of(self, other: "Interval"):
        return (other.lo <= self.lo) & (self.hi <= other.hi)

    def intersect(self, other: "Interval") -> "Interval":
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(lo > hi):
            raise IntervalError("empty intersection")
        return Interval(lo, hi)

    def clamp(self, lo: float, hi: float) -> "Interval":
        """Intersect with a mathematically proven range [lo, hi]."""
        return Interval(np.clip(self.lo, lo, hi), np.clip(self.hi, lo, hi))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Interval") -> "Interval":
        lo, lo_exact = _sum_with_exact_flag(self.lo, other.lo)
        hi, hi_exact = _sum_with_exact_flag(self.hi, other.hi)
        return Interval(np.where(lo_exact, lo, _down(lo)),
                        np.where(hi_exact, hi, _up(hi)))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: "Interval") -> "Interval":
        return self + (-other)

    def __mul__(self, other: "Interval") -> "Interval":
        p1 = self.lo * other.lo
        p2 = self.lo * other.hi
        p3 = self.hi * other.lo
        p4 = self.hi * other.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        return Interval(_down(lo), _up(hi))

    def __truediv__(self, other: "Interval") -> "Interval":
        if np.any((other.lo <= 0.0) & (other.hi >= 0.0)):
            raise DivisionByZeroInterval("divisor interval contains zero")
        q1 = self.lo / other.lo
        q2 = self.lo / other.hi
        q3 = self.hi / other.lo
        q4 = self.hi / other.hi
        lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
        hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
        return Interval(_down(lo), _up(hi))

    def half(self) -> "Interval":
        # multiplication by 0.5 is exact for every magnitude used here
        return Interval(0.5 * self.lo, 0.5 * self.hi)

    def double(self) -> "Interval":
        return Interval(2.0 * self.lo, 2.0 * self.hi)


PI = Interval(_down(math.pi), _up(math.pi))
ONE = Interval.point(1.0)


def arith(x: Interval, y: Interval, op: str) -> Interval:
    """Named dispatch for the four basic operations."""
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op in ("*", "x"):
        return x * y
    if op == "/":
        return x / y
    raise IntervalError(f"unknown operation {op!r}")


def isqr(x: Interval) -> Interval:
    """Tight enclosure of x**2 (exploits the sign structure)."""
    a = x.lo * x.lo
    b = x.hi * x.hi
    hi = _up(np.maximum(a, b))
    crosses = (x.lo <= 0.0) & (x.hi >= 0.0)
    lo = np.where(crosses, 0.0, _down(np.minimum(a, b)))
    return Interval(lo, hi)


def isqrt(x: Interval) -> Interval:
    if np.any(x.lo < _SQRT_CLAMP) or np.any(x.hi < 0.0):
        raise NegativeSqrtDomain("sqrt of an interval below the roundoff clamp")
    lo = np.maximum(x.lo, 0.0)
    return Interval(np.maximum(_down(np.sqrt(lo)), 0.0), _up(np.sqrt(x.hi)))


def _has_extremum(lo, hi, offset):
    # does [lo, hi] contain offset + 2*pi*k for some integer k?
    two_pi = 2.0 * math.pi
    k_lo = np.ceil((lo - offset) / two_pi - _EXTREMUM_SLOP)
    k_hi = np.floor((hi - offset) / two_pi + _EXTREMUM_SLOP)
    return k_hi >= k_lo


def isin(x: Interval) -> Interval:
    s_lo = np.sin(x.lo)
    s_hi = np.sin(x.hi)
    lo = _down(np.minimum(s_lo, s_hi), _TRANS_ULPS)
    hi = _up(np.maximum(s_lo, s_hi), _TRANS_ULPS)
    lo = np.where(_has_extremum(x.lo, x.hi, -0.5 * math.pi), -1.0, lo)
    hi = np.where(_has_extremum(x.lo, x.hi, 0.5 * math.pi), 1.0, hi)
    return Interval(np.clip(lo, -1.0, 1.0), np.clip(hi, -1.0, 1.0))


def icos(x: Interval) -> Interval:
    c_lo = np.cos(x.lo)
    c_hi = np.cos(x.hi)
    lo = _down(np.minimum(c_lo, c_hi), _TRANS_ULPS)
    hi = _up(np.maximum(c_lo, c_hi), _TRANS_ULPS)
    lo = np.where(_has_extremum(x.lo, x.hi, math.pi), -1.0, lo)
    hi = np.where(_has_extremum(x.lo, x.hi, 0.0), 1.0, hi)
    return Interval(np.clip(lo, -1.0, 1.0), np.clip(hi, -1.0, 1.0))


def iatan2(s: Interval, c: Interval) -> Interval:
    """Enclosure of atan2 over a box with s >= 0 (upper half plane).

    On that branch atan2 decreases in c, increases in s for c > 0 and
    decreases in s for c < 0, so the extreme corners are explicit and no
    branch cut is crossed.
    """
    if np.any(s.lo < 0.0):
        raise IntervalError("iatan2 requires a nonnegative sine part")
    lo_s = np.where(c.hi >= 0.0, s.lo, s.hi)
    hi_s = np.where(c.lo >= 0.0, s.hi, s.lo)
    lo = _down(np.arctan2(lo_s, c.hi), _TRANS_ULPS)
    hi = _up(np.arctan2(hi_s, c.lo), _TRANS_ULPS)
    return Interval(lo, hi)


def elem(x: Interval, fn: str, second: Interval | None = None) -> Interval:
    """Named dispatch for elementary enclosures."""
    if fn == "sin":
        return isin(x)
    if fn == "cos":
        return icos(x)
    if fn == "sqrt":
        return isqrt(x)
    if fn == "atan2":
        if second is None:
            raise IntervalError("atan2 needs the cosine-part interval")
        return iatan2(x, second)
    raise IntervalError(f"unknown elementary function {fn!r}")


# ---------------------------------------------------------------------------
# Forward-mode derivative enclosures (for mean-value forms)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiffInterval:
    """Interval value together with interval enclosures of its partial
    derivatives with respect to the five frame coordinates."""

    val: Interval
    grad: tuple  # five Intervals: d/dp1..d/dp4, d/dw

    def __add__(self, other: "DiffInterval") -> "DiffInterval":
        return DiffInterval(self.val + other.val,
                            tuple(a + b for a, b in zip(self.grad, other.grad)))

    def __neg__(self) -> "DiffInterval":
        return DiffInterval(-self.val, tuple(-g for g in self.grad))

    def __sub__(self, other: "DiffInterval") -> "DiffInterval":
        return self + (-other)

    def __mul__(self, other: "DiffInterval") -> "DiffInterval":
        grad = tuple(self.val * gb + other.val * ga
                     for ga, gb in zip(self.grad, other.grad))
        return DiffInterval(self.val * other.val, grad)

    def half(self) -> "DiffInterval":
        return DiffInterval(self.val.half(), tuple(g.half() for g in self.grad))

    def double(self) -> "DiffInterval":
        return DiffInterval(self.val.double(), tuple(g.double() for g in self.grad))

    def clamp(self, lo: float, hi: float) -> "DiffInterval":
        # tightening the value range by a proven bound leaves partials alone
        return DiffInterval(self.val.clamp(lo, hi), self.grad)


def _d_zero_grad(like: Interval) -> Interval:
    zero = np.zeros_like(np.asarray(like.lo, dtype=float))
    if np.ndim(zero) == 0:
        return Interval(0.0, 0.0)
    return Interval(zero, zero.copy())


def d_sqr(x: DiffInterval) -> DiffInterval:
    return DiffInterval(isqr(x.val), tuple((x.val * g).double() for g in x.grad))


def d_sqrt(x: DiffInterval) -> DiffInterval:
    root = isqrt(x.val)
    inv = ONE / root.double()
    return DiffInterval(root, tuple(inv * g for g in x.grad))


def d_sin_w(w: Interval) -> DiffInterval:
    # sin of the w coordinate itself: d/dw = cos w, other partials zero
    zero = _d_zero_grad(w)
    return DiffInterval(isin(w), (zero, zero, zero, zero, icos(w)))


def d_cos_w(w: Interval) -> DiffInterval:
    zero = _d_zero_grad(w)
    return DiffInterval(icos(w), (zero, zero, zero, zero, -isin(w)))


def d_coordinate(iv: Interval, index: int) -> DiffInterval:
    zero = _d_zero_grad(iv)
    one = Interval(np.ones_like(np.asarray(iv.lo, dtype=float)),
                   np.ones_like(np.asarray(iv.lo, dtype=float))) \
        if np.ndim(iv.lo) else Interval(1.0, 1.0)
    grad = tuple(one if i == index else zero for i in range(5))
    return DiffInterval(iv, grad)


# ---------------------------------------------------------------------------
# Frame boxes and residual enclosures
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrameBox:
    """Intervals for the five diagonal-frame coordinates.

    Enclosure claims apply to the points of the box satisfying the gauge
    p1+p2+p3+p4 = 1, so a box is only meaningful if it intersects the
    margin-truncated simplex.  `from_free` builds the p4 interval from the
    other three via the gauge; the certifier instead carries p4 as its own
    dimension and clips every coordinate against the gauge plane.
    """

    p1: Interval
    p2: Interval
    p3: Interval
    p4: Interval
    w: Interval
    margin: float

    @staticmethod
    def from_free(p1: Interval, p2: Interval, p3: Interval, w: Interval,
                  margin: float) -> "FrameBox":
        raw = ONE - p1 - p2 - p3
        lo = np.maximum(raw.lo, margin)
        hi = np.minimum(raw.hi, 1.0 - 3.0 * margin)
        if np.any(lo > hi):
            raise IntervalError("box does not intersect the gauge simplex")
        return FrameBox(p1, p2, p3, Interval(lo, hi), w, float(margin))

    def intervals(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "p3": self.p3,
                "p4": self.p4, "w": self.w}


def _lengths_core(p1, p2, p3, p4, cos_w, one, sqr, sqrt) -> dict:
    # squared lengths written as sums of nonnegative parts, e.g.
    # c^2 = (p1 - p2)^2 + 2 p1 p2 (1 - cos w), so margin boxes can never
    # produce an interval touching zero through cancellation.  Generic over
    # Interval and DiffInterval operands.
    one_minus = (one - cos_w).clamp(0.0, 2.0)
    one_plus = (one + cos_w).clamp(0.0, 2.0)

    def law(u, v, spread):
        return sqrt(sqr(u - v) + (u * v * spread).double())

    lengths = {
        "a": law(p2, p3, one_plus),
        "b": p1 + p3,
        "c": law(p1, p2, one_minus),
        "d": law(p4, p1, one_plus),
        "e": p2 + p4,
        "f": law(p3, p4, one_minus),
    }
    for name, item in lengths.items():
        value = item.val if isinstance(item, DiffInterval) else item
        if np.any(value.lo <= 0.0):
            raise IndeterminateRegion(f"length {name} touches zero on this box")
    return lengths


def _areas_core(p1, p2, p3, p4, sin_w) -> dict:
    b = p1 + p3
    e = p2 + p4
    return {
        "A123": (p2 * b * sin_w).half(),
        "A124": (p1 * e * sin_w).half(),
        "A134": (p4 * b * sin_w).half(),
        "A234": (p3 * e * sin_w).half(),
    }


def _frame_lengths(box: FrameBox, sin_w: Interval, cos_w: Interval) -> dict:
    return _lengths_core(box.p1, box.p2, box.p3, box.p4, cos_w, ONE, isqr, isqrt)


def _frame_areas(box: FrameBox, sin_w: Interval) -> dict:
    return _areas_core(box.p1, box.p2, box.p3, box.p4, sin_w)


def _frame_angles(box: FrameBox, sin_w: Interval, cos_w: Interval) -> dict:
    # split angles via atan2 of (opposite segment * sin w, adjacent
    # projection); the common positive factor 1/length cancels inside atan2,
    # and every split angle provably lies in (0, pi)
    p1, p2, p3, p4 = box.p1, box.p2, box.p3, box.p4
    pi_hi = float(np.max(np.asarray(PI.hi)))
    ang = {
        "alpha1": iatan2(p2 * sin_w, p1 - p2 * cos_w),
        "beta1": iatan2(p4 * sin_w, p1 + p4 * cos_w),
        "alpha2": iatan2(p3 * sin_w, p2 + p3 * cos_w),
        "beta2": iatan2(p1 * sin_w, p2 - p1 * cos_w),
        "alpha3": iatan2(p4 * sin_w, p3 - p4 * cos_w),
        "beta3": iatan2(p2 * sin_w, p3 + p2 * cos_w),
        "alpha4": iatan2(p1 * sin_w, p4 + p1 * cos_w),
        "beta4": iatan2(p3 * sin_w, p4 - p3 * cos_w),
    }
    return {name: iv.clamp(0.0, pi_hi) for name, iv in ang.items()}


def frame_quantities(box: FrameBox) -> dict:
    """Named enclosures of every intermediate geometric quantity; used by the
    containment-fuzz tests."""
    sin_w = isin(box.w).clamp(0.0, 1.0)
    cos_w = icos(box.w)
    out = {}
    out.update(_frame_lengths(box, sin_w, cos_w))
    out.update(_frame_areas(box, sin_w))
    ang = _frame_angles(box, sin_w, cos_w)
    out.update(ang)
    out["X"] = ((ang["alpha2"] + ang["beta1"]) - (ang["alpha4"] + ang["beta3"])).half()
    out["Y"] = ((ang["alpha1"] + ang["beta4"]) - (ang["alpha3"] + ang["beta2"])).half()
    out["W"] = ((ang["alpha2"] + ang["beta1"]) + (ang["alpha4"] + ang["beta3"])).half()
    out["Wp"] = PI - out["W"]
    out["gamma1"] = ang["alpha1"] + ang["beta1"]
    out["gamma3"] = ang["alpha3"] + ang["beta3"]
    return out


def _edge_residual_core(lengths: dict, areas: dict):
    a, b, c = lengths["a"], lengths["b"], lengths["c"]
    d, e, f = lengths["d"], lengths["e"], lengths["f"]
    A123, A124 = areas["A123"], areas["A124"]
    A134, A234 = areas["A134"], areas["A234"]

    def slack(s1, s2, s3, s4, twice):
        # every edge slack is a sum of two triangle inequalities, hence >= 0
        out = (s1 + s2) + (s3 + s4) - twice.double()
        return out.clamp(0.0, np.inf)

    E12 = f * A123 * A124 * slack(a, b, e, d, c)
    E23 = d * A123 * A234 * slack(c, b, e, f, a)
    E34 = c * A134 * A234 * slack(d, b, e, a, f)
    E41 = a * A124 * A134 * slack(c, e, b, f, d)
    E13 = e * A123 * A134 * slack(c, a, d, f, b)
    E24 = b * A124 * A234 * slack(c, d, a, f, e)
    return ((E12 + E23) + (E34 + E41)) - (E13 + E24)


def _edge_residual(lengths: dict, areas: dict) -> Interval:
    return _edge_residual_core(lengths, areas)


def edge_residual_with_gradient(box: FrameBox) -> DiffInterval:
    """Edge-path residual with partial-derivative enclosures with respect to
    (p1, p2, p3, p4, w) over the box."""
    p = [d_coordinate(getattr(box, f"p{i + 1}"), i) for i in range(4)]
    sin_w = d_sin_w(box.w).clamp(0.0, 1.0)
    cos_w = d_cos_w(box.w).clamp(-1.0, 1.0)
    one = DiffInterval(ONE, tuple(_d_zero_grad(box.w) for _ in range(5)))
    lengths = _lengths_core(p[0], p[1], p[2], p[3], cos_w, one, d_sqr, d_sqrt)
    areas = _areas_core(p[0], p[1], p[2], p[3], sin_w)
    return _edge_residual_core(lengths, areas)


def edge_mean_value_enclosure(box: FrameBox) -> Interval:
    """Mean-value form of the edge-path residual: the value at the box
    center plus gradient enclosures times the coordinate deviations.  Much
    tighter than the natural evaluation on small boxes, where the natural
    form loses a constant factor to operand dependency."""
    di = edge_residual_with_gradient(box)
    coords = (box.p1, box.p2, box.p3, box.p4, box.w)
    mids = [c.mid for c in coords]
    center = FrameBox(Interval.point(mids[0]), Interval.point(mids[1]),
                      Interval.point(mids[2]), Interval.point(mids[3]),
                      Interval.point(mids[4]), box.margin)
    sin_c = isin(center.w).clamp(0.0, 1.0)
    cos_c = icos(center.w).clamp(-1.0, 1.0)
    total = _edge_residual(_frame_lengths(center, sin_c, cos_c),
                           _frame_areas(center, sin_c))
    for coord, mid, grad in zip(coords, mids, di.grad):
        total = total + grad * (coord - Interval.point(mid))
    return total.intersect(di.val)


def _group_trig_factors(box: FrameBox, angles: dict, lengths: dict | None = None,
                        sin_w: Interval | None = None) -> dict:
    """Enclosures of the angular factors entering the factored group forms
    and the closed multiplicity-two expression.

    When lengths and sin_w are supplied, sin X and sin Y are additionally
    intersected with their exact area-quotient forms
    sin X = s (p3 p4 - p1 p2) / (a d) and sin Y = s (p2 p3 - p1 p4) / (c f),
    which are free of angle-chain dependency."""
    alpha1, alpha2 = angles["alpha1"], angles["alpha2"]
    alpha3, alpha4 = angles["alpha3"], angles["alpha4"]
    beta1, beta2 = angles["beta1"], angles["beta2"]
    beta3, beta4 = angles["beta3"], angles["beta4"]

    # In frame coordinates the diagonal crossing angle is the parameter w
    # itself, so W needs no angle chain at all.
    W = box.w
    Wp = PI - W

    # X and Y admit several exact forms (the four-angle half-difference and
    # two two-angle differences); each is a valid enclosure of the same
    # number, so intersecting them is sound and tight.  |X| < W and |Y| < W'
    # because the four split-angle sums are positive.
    X = ((alpha2 + beta1) - (alpha4 + beta3)).half() \
        .intersect(alpha2 - alpha4).intersect(beta1 - beta3)
    Y = ((alpha1 + beta4) - (alpha3 + beta2)).half() \
        .intersect(beta4 - beta2).intersect(alpha1 - alpha3)
    w_hi = np.asarray(W.hi)
    wp_hi = np.asarray(Wp.hi)
    X = Interval(np.maximum(X.lo, -w_hi), np.minimum(X.hi, w_hi))
    Y = Interval(np.maximum(Y.lo, -wp_hi), np.minimum(Y.hi, wp_hi))

    gamma13 = ((alpha1 + beta1) + (alpha3 + beta3)).clamp(0.0, 2.0 * math.pi)
    diff14 = (alpha1 - beta4).intersect(alpha3 - beta2)
    diff12 = (beta1 - alpha2).intersect(beta3 - alpha4)

    sin_X = isin(X)
    sin_Y = isin(Y)
    if lengths is not None and sin_w is not None:
        p1, p2, p3, p4 = box.p1, box.p2, box.p3, box.p4
        quot_x = ((p3 * p4 - p1 * p2) * sin_w) / (lengths["a"] * lengths["d"])
        quot_y = ((p2 * p3 - p1 * p4) * sin_w) / (lengths["c"] * lengths["f"])
        sin_X = sin_X.intersect(quot_x.clamp(-1.0, 1.0))
        sin_Y = sin_Y.intersect(quot_y.clamp(-1.0, 1.0))
    sin_W = isin(W).clamp(0.0, 1.0)
    sin_hW = isin(W.half()).clamp(0.0, 1.0)
    sin_hWp = isin(Wp.half()).clamp(0.0, 1.0)
    cos_hW = icos(W.half()).clamp(0.0, 1.0)
    cos_hWp = icos(Wp.half()).clamp(0.0, 1.0)
    sin_hX = isin(X.half())
    sin_hY = isin(Y.half())
    cos_hX = icos(X.half()).clamp(0.0, 1.0)
    cos_hY = icos(Y.half()).clamp(0.0, 1.0)
    sin_hg13 = isin(gamma13.half()).clamp(0.0, 1.0)
    sin_d14 = isin(diff14.half())
    sin_d12 = isin(diff12.half())

    even_part = (isqr(sin_hX) * isqr(cos_hW) * isqr(cos_hY)
                 + isqr(cos_hX) * isqr(cos_hWp) * isqr(sin_hY)).double()
    odd_part = (sin_d14 * sin_d12 * sin_hg13).double()
    return {
        "group_x": sin_X * sin_hWp * sin_hY * sin_d14,
        "group_y": sin_Y * sin_hW * sin_hX * sin_d12,
        "group_w": sin_W * cos_hX * cos_hY * sin_hg13,
        "mult2": -(even_part + odd_part),
    }


def _group_poly_parts(box: FrameBox, lengths: dict, areas: dict,
                      sin_w: Interval) -> dict:
    """The same group sums through their area-factored polynomial forms.

    Each multiplicity-one group collapses onto a common area difference:

        X group: (bc A234 + ce A134 - bf A124 - ef A123) (A134 - A124)
        Y group: (bd A234 + de A123 - ab A124 - ae A134) (A123 - A124)
        W group: (af A124 + df A123 + cd A234 + ac A134) (A123 + A134)

    with A134 - A124 = s (p3 p4 - p1 p2)/2 and A123 - A124 =
    s (p2 p3 - p1 p4)/2 evaluated directly from the frame coordinates, and
    the raw multiplicity-two sum of area products.  No angle chains enter,
    which makes these forms tight on boxes where the trig forms suffer
    operand dependency.
    """
    p1, p2, p3, p4 = box.p1, box.p2, box.p3, box.p4
    a, b, c = lengths["a"], lengths["b"], lengths["c"]
    d, e, f = lengths["d"], lengths["e"], lengths["f"]
    A123, A124 = areas["A123"], areas["A124"]
    A134, A234 = areas["A134"], areas["A234"]
    diff_x = ((p3 * p4 - p1 * p2) * sin_w).half()
    diff_y = ((p2 * p3 - p1 * p4) * sin_w).half()
    total_area = (b * e * sin_w).half()
    mult2 = ((b * e * (A123 * A134 + A124 * A234)
              - a * d * (A123 * A234 + A124 * A134))
             - c * f * (A124 * A123 + A134 * A234)).double()
    return {
        "group_x": (b * c * A234 + c * e * A134 - b * f * A124 - e * f * A123) * diff_x,
        "group_y": (b * d * A234 + d * e * A123 - a * b * A124 - a * e * A134) * diff_y,
        "group_w": (a * f * A124 + d * f * A123 + c * d * A234 + a * c * A134) * total_area,
        "mult2": mult2,
    }


def _lemma_residual(box: FrameBox, lengths: dict, angles: dict) -> Interval:
    factors = _group_trig_factors(box, angles)
    K = ((lengths["a"] * lengths["b"]) * (lengths["c"] * lengths["d"])) \
        * (lengths["e"] * lengths["f"])
    angular = ((factors["group_x"] + factors["group_y"]) + factors["group_w"]) \
        + factors["mult2"]
    return K * angular


def _combined_residual(box: FrameBox, lengths: dict, areas: dict,
                       angles: dict, sin_w: Interval) -> Interval:
    """Intersection of the trig and polynomial group forms.

    Each total is computed in its tightest association (the trig factors
    summed first, then scaled once by abcdef, to keep interval
    sub-distributivity on our side); the per-group mixed intersection is a
    third valid enclosure of the same residual.
    """
    trig = _group_trig_factors(box, angles, lengths, sin_w)
    poly = _group_poly_parts(box, lengths, areas, sin_w)
    K = ((lengths["a"] * lengths["b"]) * (lengths["c"] * lengths["d"])) \
        * (lengths["e"] * lengths["f"])
    keys = ("group_x", "group_y", "group_w", "mult2")
    trig_total = K * (((trig[keys[0]] + trig[keys[1]]) + trig[keys[2]])
                      + trig[keys[3]])
    poly_total = ((poly[keys[0]] + poly[keys[1]]) + poly[keys[2]]) + poly[keys[3]]
    mixed_total = None
    for key in keys:
        piece = (K * trig[key]).intersect(poly[key])
        mixed_total = piece if mixed_total is None else mixed_total + piece
    return trig_total.intersect(poly_total).intersect(mixed_total)


def residual_enclosure(box: FrameBox, path: str = "edge") -> Interval:
    """Certified enclosure of the inequality residual over a frame box.

    The value enclosed is the raw length^6 residual at the gauge
    p1+p2+p3+p4 = 1.  Every path encloses the same function, so the
    intersection (path="both": edge, lemma, and the edge mean-value form)
    is also a valid, tighter enclosure.
    """
    sin_w = isin(box.w).clamp(0.0, 1.0)
    cos_w = icos(box.w)
    lengths = _frame_lengths(box, sin_w, cos_w)
    if path == "edge":
        return _edge_residual(lengths, _frame_areas(box, sin_w))
    if path == "lemma":
        return _lemma_residual(box, lengths, _frame_angles(box, sin_w, cos_w))
    if path == "both":
        combined = _combined_residual(box, lengths, _frame_areas(box, sin_w),
                                      _frame_angles(box, sin_w, cos_w), sin_w)
        return edge_mean_value_enclosure(box).intersect(combined)
    raise IntervalError(f"unknown enclosure path {path!r}")
