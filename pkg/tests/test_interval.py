"""Outward-rounded interval arithmetic and residual enclosures."""

import math

import numpy as np
import pytest

from quadineq.geometry import metrics_from_frames, sample_frames
from quadineq.interval import (
    PI,
    DivisionByZeroInterval,
    FrameBox,
    Interval,
    IntervalError,
    NegativeSqrtDomain,
    arith,
    edge_mean_value_enclosure,
    edge_residual_with_gradient,
    elem,
    frame_quantities,
    iatan2,
    icos,
    isin,
    isqr,
    isqrt,
    residual_enclosure,
)
from quadineq.kernel import residual


def contains(iv, x, slop=0.0):
    return np.all((iv.lo - slop <= x) & (x <= iv.hi + slop))


def rand_interval(rng, lo=-5.0, hi=5.0):
    a, b = np.sort(rng.uniform(lo, hi, 2))
    return Interval(float(a), float(b))


# ---------------------------------------------------------------------------
# basic arithmetic
# ---------------------------------------------------------------------------

def test_exact_addition_keeps_endpoints():
    out = arith(Interval(1.0, 2.0), Interval(3.0, 4.0), "+")
    assert (out.lo, out.hi) == (4.0, 6.0)


def test_inexact_addition_widens_outward():
    out = arith(Interval(0.1, 0.1), Interval(0.2, 0.2), "+")
    assert out.lo < 0.1 + 0.2 < out.hi
    assert out.hi - out.lo <= 4 * np.finfo(float).eps


def test_multiplication_covers_sign_cases():
    out = arith(Interval(-1.0, 2.0), Interval(3.0, 4.0), "*")
    assert out.lo <= -4.0 <= out.hi and out.lo <= 8.0
    assert -4.0 - out.lo <= 1e-14 and out.hi - 8.0 <= 1e-14
    out = arith(Interval(-2.0, -1.0), Interval(-4.0, 3.0), "*")
    assert contains(out, 8.0) and contains(out, -6.0)


def test_division_by_zero_interval_raises():
    with pytest.raises(DivisionByZeroInterval):
        arith(Interval(1.0, 1.0), Interval(0.0, 1.0), "/")
    out = arith(Interval(1.0, 2.0), Interval(2.0, 4.0), "/")
    assert contains(out, 0.25) and contains(out, 1.0)


def test_negation_and_subtraction():
    out = Interval(1.0, 2.0) - Interval(0.5, 3.0)
    assert (out.lo, out.hi) == (-2.0, 1.5)


def test_square_tight_around_zero():
    out = isqr(Interval(-2.0, 3.0))
    assert out.lo == 0.0 and 9.0 <= out.hi <= 9.0 * (1 + 1e-15)


def test_sqrt_monotone_and_domain():
    out = isqrt(Interval(4.0, 9.0))
    assert contains(out, 2.0) and contains(out, 3.0)
    assert out.hi - 3.0 <= 1e-14 and 2.0 - out.lo <= 1e-14
    clamped = isqrt(Interval(-1e-15, 1.0))
    assert clamped.lo == 0.0
    with pytest.raises(NegativeSqrtDomain):
        isqrt(Interval(-1.0, 1.0))


def test_sin_monotone_piece():
    out = elem(Interval(0.0, math.pi / 2), "sin")
    assert out.lo <= 0.0 and out.hi >= 1.0
    assert -out.lo <= 1e-14 and out.hi - 1.0 <= 1e-14


def test_sin_spanning_extremum():
    out = isin(Interval(1.0, 2.5))
    assert out.hi == 1.0
    assert contains(out, math.sin(1.0)) and contains(out, math.sin(2.5))


def test_cos_spanning_full_range():
    out = elem(Interval(0.0, math.pi), "cos")
    assert (out.lo, out.hi) == (-1.0, 1.0)


def test_atan2_upper_halfplane():
    out = iatan2(Interval(1.0, 1.0), Interval(-1.0, 1.0))
    assert contains(out, math.pi / 4) and contains(out, 3 * math.pi / 4)
    out = elem(Interval(0.5, 2.0), "atan2", Interval(1.0, 1.0))
    assert contains(out, math.atan2(0.5, 1.0)) and contains(out, math.atan2(2.0, 1.0))
    with pytest.raises(IntervalError):
        iatan2(Interval(-1.0, 1.0), Interval(1.0, 1.0))


def test_pi_interval_contains_pi():
    assert PI.lo < math.pi < PI.hi or PI.lo <= math.pi <= PI.hi


def test_empty_intersection_raises():
    with pytest.raises(IntervalError):
        Interval(0.0, 1.0).intersect(Interval(2.0, 3.0))


# ---------------------------------------------------------------------------
# containment fuzzing
# ---------------------------------------------------------------------------

def _random_boxes(rng, n, margin=0.1, width_scale=0.2):
    """Feasible frame boxes around random gauge points, plus an interior
    point of each box lying exactly on the gauge simplex."""
    simplex = rng.dirichlet((1.0, 1.0, 1.0, 1.0), size=n)
    p_mid = margin + (1.0 - 4.0 * margin) * simplex
    w_mid = rng.uniform(margin * math.pi, (1.0 - margin) * math.pi, size=n)
    half = rng.uniform(0.0, width_scale, size=(n, 5))
    p_lo = np.maximum(p_mid - half[:, :4], margin)
    p_hi = np.minimum(p_mid + half[:, :4], 1.0 - 3.0 * margin)
    w_lo = np.maximum(w_mid - half[:, 4], margin * math.pi)
    w_hi = np.minimum(w_mid + half[:, 4], (1.0 - margin) * math.pi)
    box = FrameBox(Interval(p_lo[:, 0], p_hi[:, 0]), Interval(p_lo[:, 1], p_hi[:, 1]),
                   Interval(p_lo[:, 2], p_hi[:, 2]), Interval(p_lo[:, 3], p_hi[:, 3]),
                   Interval(w_lo, w_hi), margin)
    return box, p_mid, w_mid


def test_point_in_box_containment_fuzz():
    rng = np.random.default_rng(2024)
    box, p_mid, w_mid = _random_boxes(rng, 20_000)
    m = metrics_from_frames(p_mid, w_mid)
    quantities = frame_quantities(box)
    point_values = {
        "a": m.a, "b": m.b, "c": m.c, "d": m.d, "e": m.e, "f": m.f,
        "A123": m.A123, "A124": m.A124, "A134": m.A134, "A234": m.A234,
        "alpha1": m.alpha1, "alpha2": m.alpha2, "alpha3": m.alpha3,
        "alpha4": m.alpha4, "beta1": m.beta1, "beta2": m.beta2,
        "beta3": m.beta3, "beta4": m.beta4,
        "X": m.X, "Y": m.Y, "W": m.W, "Wp": m.Wp,
        "gamma1": m.gamma1, "gamma3": m.gamma3,
    }
    for name, value in point_values.items():
        iv = quantities[name]
        assert np.all((iv.lo <= value) & (value <= iv.hi)), name


def test_residual_enclosure_containment_fuzz():
    rng = np.random.default_rng(4096)
    box, p_mid, w_mid = _random_boxes(rng, 20_000, width_scale=0.1)
    m = metrics_from_frames(p_mid, w_mid)
    r = residual(m, "edge")
    for path in ("edge", "lemma", "both"):
        enc = residual_enclosure(box, path)
        assert np.all((enc.lo <= r) & (r <= enc.hi)), path


def test_gradient_containment_by_finite_differences():
    rng = np.random.default_rng(777)
    box, p_mid, w_mid = _random_boxes(rng, 2_000, width_scale=0.05)
    di = edge_residual_with_gradient(box)
    h = 1e-6
    coords = np.concatenate([p_mid, w_mid[:, None]], axis=1)

    def f(c):
        return residual(metrics_from_frames(c[:, :4], c[:, 4]), "edge")

    for j in range(5):
        up = coords.copy()
        dn = coords.copy()
        up[:, j] += h
        dn[:, j] -= h
        fd = (f(up) - f(dn)) / (2 * h)
        grad = di.grad[j]
        # finite differences carry O(h^2) truncation error
        assert np.all((grad.lo - 1e-5 <= fd) & (fd <= grad.hi + 1e-5)), j


def test_mean_value_enclosure_contains_point_values():
    rng = np.random.default_rng(31337)
    box, p_mid, w_mid = _random_boxes(rng, 20_000, width_scale=0.05)
    r = residual(metrics_from_frames(p_mid, w_mid), "edge")
    enc = edge_mean_value_enclosure(box)
    assert np.all((enc.lo <= r) & (r <= enc.hi))


def test_inclusion_monotonicity_core_ops():
    rng = np.random.default_rng(55)
    for _ in range(2_000):
        outer = rand_interval(rng)
        t = np.sort(rng.uniform(0, 1, 2))
        inner = Interval(outer.lo + t[0] * (outer.hi - outer.lo),
                         outer.lo + t[1] * (outer.hi - outer.lo))
        other = rand_interval(rng)
        assert (inner + other).subset_of(outer + other)
        assert (inner * other).subset_of(outer * other)
        assert (inner - other).subset_of(outer - other)
        assert isqr(inner).subset_of(isqr(outer))
        assert isin(inner).subset_of(isin(outer))
        assert icos(inner).subset_of(icos(outer))


def test_inclusion_monotonicity_residual():
    rng = np.random.default_rng(808)
    outer, p_mid, w_mid = _random_boxes(rng, 5_000, width_scale=0.08)

    def shrink(iv, t0, t1):
        width = iv.hi - iv.lo
        return Interval(iv.lo + t0 * width, iv.hi - t1 * width)

    t = rng.uniform(0.0, 0.3, size=(5_000, 10))
    inner = FrameBox(shrink(outer.p1, t[:, 0], t[:, 1]),
                     shrink(outer.p2, t[:, 2], t[:, 3]),
                     shrink(outer.p3, t[:, 4], t[:, 5]),
                     shrink(outer.p4, t[:, 6], t[:, 7]),
                     shrink(outer.w, t[:, 8], t[:, 9]), outer.margin)
    for path in ("edge", "lemma"):
        enc_in = residual_enclosure(inner, path)
        enc_out = residual_enclosure(outer, path)
        assert np.all(enc_in.subset_of(enc_out)), path


def test_width_convergence_under_halving():
    rng = np.random.default_rng(99)
    for _ in range(20):
        simplex = rng.dirichlet((1.0, 1.0, 1.0, 1.0))
        p_mid = 0.1 + 0.6 * simplex
        w_mid = rng.uniform(0.2 * math.pi, 0.8 * math.pi)
        widths = []
        for half in (0.02, 0.01):
            box = FrameBox(
                Interval(p_mid[0] - half, p_mid[0] + half),
                Interval(p_mid[1] - half, p_mid[1] + half),
                Interval(p_mid[2] - half, p_mid[2] + half),
                Interval(p_mid[3] - half, p_mid[3] + half),
                Interval(w_mid - half, w_mid + half), 0.05)
            widths.append(float(residual_enclosure(box, "both").width))
        assert widths[1] <= widths[0] / 1.5


# ---------------------------------------------------------------------------
# frame boxes and enclosures
# ---------------------------------------------------------------------------

def test_degenerate_box_at_square_frame():
    box = FrameBox.from_free(Interval.point(0.25), Interval.point(0.25),
                             Interval.point(0.25), Interval.point(math.pi / 2),
                             0.1)
    enc = residual_enclosure(box, "both")
    expect = 2.0 * (math.sqrt(2.0) / 4.0) ** 6  # exactly 1/256
    assert contains(enc, expect)
    assert enc.width <= 1e-9


def test_from_free_derives_p4():
    box = FrameBox.from_free(Interval(0.2, 0.3), Interval(0.2, 0.3),
                             Interval(0.2, 0.3), Interval(1.0, 1.2), 0.1)
    assert box.p4.lo >= 0.1 and box.p4.hi <= 0.7
    assert box.p4.lo <= 0.4 <= box.p4.hi
    with pytest.raises(IntervalError):
        FrameBox.from_free(Interval(0.6, 0.7), Interval(0.6, 0.7),
                           Interval(0.6, 0.7), Interval(1.0, 1.2), 0.1)


def test_whole_domain_enclosure_contains_samples():
    margin = 0.1
    box = FrameBox.from_free(Interval(margin, 0.7), Interval(margin, 0.7),
                             Interval(margin, 0.7),
                             Interval(margin * math.pi, (1 - margin) * math.pi),
                             margin)
    enc = residual_enclosure(box, "both")
    p, w = sample_frames(1234, 1000, margin=margin)
    r = residual(metrics_from_frames(p, w), "edge")
    assert np.isfinite(enc.lo) and np.isfinite(enc.hi)
    assert np.all((enc.lo <= r) & (r <= enc.hi))


def test_midpoint_residual_in_enclosure():
    rng = np.random.default_rng(17)
    box, p_mid, w_mid = _random_boxes(rng, 200)
    mids_p = np.stack([box.p1.mid, box.p2.mid, box.p3.mid, box.p4.mid], axis=1)
    r = residual(metrics_from_frames(mids_p, box.w.mid), "edge")
    enc = residual_enclosure(box, "both")
    assert np.all((enc.lo <= r) & (r <= enc.hi))


def test_interval_serialization_pairs():
    iv = Interval(0.1, 0.2)
    from quadineq.ioutil import dumps
    text = dumps([iv.lo, iv.hi])
    lo, hi = [float(v) for v in text.strip("[]").split(",")]
    assert lo == 0.1 and hi == 0.2
