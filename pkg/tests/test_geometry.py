import numpy as np
import pytest

from anilap.errors import InvalidRadius
from anilap.geometry import (Anisotropy, beta_theta, cover, metric_dist, rect,
                             scale_map)


def test_anisotropy_basic():
    a = Anisotropy((1.5, 0.5))
    assert a.d == 2
    assert a.alpha_max == 1.5
    assert a.alpha_min == 0.5
    assert a.beta == pytest.approx(1.0 / 1.5 + 1.0 / 0.5, rel=1e-15)
    assert a.exponents() == (1.0, 3.0)


def test_anisotropy_rejects_bad_orders():
    for alpha in ((2.0, 0.5), (0.0, 0.5), (-0.3,), (2.5, 0.5)):
        with pytest.raises(ValueError):
            Anisotropy(alpha)


def test_beta_theta_frozen():
    beta, theta = beta_theta(Anisotropy((1.5, 0.5)))
    assert beta == pytest.approx(8.0 / 3.0, rel=1e-15)
    assert theta == pytest.approx(2.0 * beta / (beta - 1.0), rel=1e-15)
    assert theta == pytest.approx(3.2, rel=1e-15)


def test_rect_half_widths():
    a = Anisotropy((1.5, 0.5))
    m = rect(a, (0.0, 0.0), 0.5)
    # half-width along axis k is r^(alpha_max/alpha_k)
    assert m.half_widths == pytest.approx((0.5, 0.125), rel=1e-15)
    assert m.volume == pytest.approx(0.25, rel=1e-15)


def test_rect_rejects_bad_radius():
    a = Anisotropy((1.0, 1.0))
    with pytest.raises(InvalidRadius):
        rect(a, (0.0, 0.0), -1.0)
    with pytest.raises(InvalidRadius):
        rect(a, (0.0, 0.0), float("inf"))


def test_volume_doubling_exact(rng):
    # |M_{lam r}| / |M_r| = lam^(alpha_max * beta), exactly in closed form
    for _ in range(25):
        d = int(rng.integers(1, 4))
        a = Anisotropy(tuple(rng.uniform(0.2, 1.9, size=d)))
        r = float(rng.uniform(0.05, 2.0))
        lam = float(rng.uniform(1.1, 4.0))
        ratio = rect(a, (0.0,) * d, lam * r).volume / rect(a, (0.0,) * d, r).volume
        assert ratio == pytest.approx(lam ** (a.alpha_max * a.beta), rel=1e-12)


def test_metric_dist_properties(rng):
    a = Anisotropy((1.5, 0.5))
    x = rng.uniform(-2, 2, size=(200, 2))
    y = rng.uniform(-2, 2, size=(200, 2))
    dxy = metric_dist(a, x, y)
    dyx = metric_dist(a, y, x)
    assert np.all(dxy >= 0.0)
    assert np.all(dxy <= 1.0)  # clamped
    np.testing.assert_allclose(dxy, dyx, rtol=0, atol=0)
    assert metric_dist(a, x[0], x[0]) == 0.0
    # sup formula: max_k |x_k - y_k|^(alpha_k / alpha_max), clamped at 1
    manual = np.minimum(
        np.max(np.abs(x - y) ** (np.array(a.alpha) / a.alpha_max), axis=1), 1.0)
    np.testing.assert_allclose(dxy, manual, rtol=1e-14)


def test_metric_ball_is_rect(rng):
    # for r <= 1 the metric ball coincides with the anisotropic rectangle
    a = Anisotropy((1.2, 0.4, 0.9))
    center = np.array([0.3, -0.2, 0.1])
    for r in (0.25, 0.5, 0.9):
        m = rect(a, center, r)
        pts = center + rng.uniform(-1.5, 1.5, size=(2000, 3))
        inside_rect = m.contains(pts)
        inside_ball = metric_dist(a, center, pts) <= r
        np.testing.assert_array_equal(inside_rect, inside_ball)


def test_scale_map_factors():
    a = Anisotropy((1.5, 0.5))
    sm = scale_map(a, 2.0)
    assert sm.diag == pytest.approx((2.0, 8.0), rel=1e-15)
    assert sm.det == pytest.approx(16.0, rel=1e-15)
    assert sm.time_factor == pytest.approx(2.0 ** a.alpha_max, rel=1e-15)
    assert sm.energy_factor == pytest.approx(
        2.0 ** (a.alpha_max - a.alpha_max * a.beta), rel=1e-15)


def test_scale_map_moves_rectangles(rng):
    a = Anisotropy((1.5, 0.5))
    sm = scale_map(a, 2.0)
    m1 = rect(a, (0.0, 0.0), 0.5)
    m2 = rect(a, (0.0, 0.0), 1.0)
    corners = np.array(m1.half_widths)
    np.testing.assert_allclose(sm.apply(corners), m2.half_widths, rtol=1e-14)
    inv = sm.inverse() if callable(sm.inverse) else sm.inverse
    np.testing.assert_allclose(inv.apply(sm.apply(corners)), corners,
                               rtol=1e-14)


def test_cover_covers(rng):
    a = Anisotropy((1.5, 0.5))
    region = rect(a, (0.0, 0.0), 0.5)
    with pytest.raises(InvalidRadius):
        cover(a, region, 0.25)  # radius must sit strictly inside (0, 1/4)
    balls = cover(a, region, 0.2)
    pts = np.column_stack([
        rng.uniform(-hw, hw, size=500) for hw in region.half_widths])
    hit = np.zeros(len(pts), dtype=bool)
    for b in balls:
        hit |= b.contains(pts)
    assert np.all(hit)
