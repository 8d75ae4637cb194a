import numpy as np
import pytest

from anilap.energy import (CutoffSpec, build_cutoff, carre_du_champ,
                           cutoff_bound_value, cutoff_bounds, energy_form,
                           fourier_energy, multiplier_comparability, norms,
                           periodic_energy, second_moment_field)
from anilap.errors import SupportViolation, WindowError
from anilap.geometry import rect
from anilap.grids import Constant, GridFunction, TensorGrid


FIG_SPEC = CutoffSpec(center=(0.0, 0.0), r=0.5, lam=1.5)


def test_cutoff_profile(aniso, kernel):
    g = TensorGrid.for_rect(aniso, FIG_SPEC.outer_rect(aniso), 65, pad_cells=8)
    tau = build_cutoff(FIG_SPEC, g)
    pts = g.mesh().reshape(-1, 2)
    vals = tau.values.ravel()
    inner = FIG_SPEC.inner_rect(aniso)
    outer = FIG_SPEC.outer_rect(aniso)
    assert np.all(vals[inner.contains(pts)] == 1.0)
    assert np.all(vals[~outer.contains(pts)] == 0.0)
    assert np.all((vals >= 0.0) & (vals <= 1.0))
    assert tau.exterior.range() == (0.0, 0.0)


def test_cutoff_window_errors(aniso):
    g = TensorGrid.for_rect(aniso, rect(aniso, (0.0, 0.0), 1.0), 33, pad_cells=4)
    with pytest.raises(WindowError):
        build_cutoff(CutoffSpec(center=(0.0, 0.0), r=0.5, lam=1.02), g)
    with pytest.raises(WindowError):
        # outer rectangle pokes out of the represented window
        build_cutoff(CutoffSpec(center=(0.0, 0.0), r=0.9, lam=1.5), g)


def test_cutoff_bound_value_frozen(aniso):
    # independently computed: 8 * 0.5^-1.5 * (0.5^-1.5 + 2.375^-0.5)
    assert cutoff_bound_value(aniso, 0.5, 1.5) == pytest.approx(78.682607, rel=1e-6)


def test_cutoff_bounds_default_grid(aniso, kernel):
    cb = cutoff_bounds(kernel, FIG_SPEC)
    assert cb.measured <= cb.bound
    assert tuple(cb) == (cb.measured, cb.bound)
    assert cb.ok
    assert cb.measured == pytest.approx(32.8221, rel=1e-3)
    for s, b in zip(cb.slopes, FIG_SPEC.slope_budget(aniso)):
        assert s <= b


def test_cutoff_tail_product(aniso, kernel):
    cb0 = cutoff_bounds(kernel, FIG_SPEC)
    u = GridFunction(cb0.grid, np.ones(cb0.grid.window_shape))
    cb = cutoff_bounds(kernel, FIG_SPEC, grid=cb0.grid, u=u)
    assert cb.tail_product <= cb.tail_product_bound


def test_energy_form_kills_constants(grid, kernel):
    u = GridFunction(grid, np.ones(grid.window_shape), exterior=Constant(1.0))
    assert energy_form(kernel, None, u) == pytest.approx(0.0, abs=1e-10)


def test_energy_form_symmetric_bilinear(aniso, grid, kernel, rng):
    region = rect(aniso, (0.0, 0.0), 0.5)
    u = GridFunction(grid, rng.standard_normal(grid.window_shape))
    v = GridFunction(grid, rng.standard_normal(grid.window_shape))
    euv = energy_form(kernel, region, u, v)
    evu = energy_form(kernel, region, v, u)
    assert euv == pytest.approx(evu, rel=1e-12)
    two_u = GridFunction(grid, 2.0 * u.values)
    assert energy_form(kernel, region, two_u) == pytest.approx(
        4.0 * energy_form(kernel, region, u), rel=1e-12)


def test_norms_bundle(aniso, grid, kernel):
    region = rect(aniso, (0.0, 0.0), 0.85)
    tau = build_cutoff(CutoffSpec(center=(0.0, 0.0), r=0.4, lam=2.0), grid)
    nb = norms(kernel, region, tau)
    v2, h2 = nb  # unpacks as the seminorm/norm pair
    assert v2 == nb.v2 and h2 == nb.h2
    assert 0.0 < nb.l2 < h2
    assert nb.tail_term >= 0.0
    assert v2 > 0.0


def test_norms_requires_support(aniso, grid, kernel):
    region = rect(aniso, (0.0, 0.0), 0.25)
    vals = np.ones(grid.window_shape)  # spills far outside the region
    with pytest.raises(SupportViolation):
        norms(kernel, region, GridFunction(grid, vals))


def test_carre_is_second_moment(grid, kernel):
    tau = build_cutoff(CutoffSpec(center=(0.0, 0.0), r=0.4, lam=2.0), grid)
    assert np.array_equal(carre_du_champ(tau, kernel),
                          second_moment_field(tau, kernel, tails=True))


def test_periodic_vs_fourier_energy(aniso, kernel):
    g = TensorGrid.periodic_cell(aniso, ((-4.0, 4.0), (-4.0, 4.0)), 64)
    x = g.mesh()
    u = GridFunction(g, np.cos(np.pi / 4.0 * x[..., 0])
                     * np.cos(np.pi / 2.0 * x[..., 1]))
    pe = periodic_energy(u, kernel)
    fe = fourier_energy(u, aniso)
    assert pe > 0.0 and fe > 0.0
    assert 0.5 < pe / fe < 2.0  # quadrature vs exact symbol at finite h


def test_multiplier_comparability_small(aniso):
    out = multiplier_comparability(aniso, n=32, trials=3)
    assert out["constant"] >= 1.0
    assert out["constant"] < 2.0
    for r in out["ratios"]:
        assert 1.0 / out["constant"] <= r <= out["constant"] + 1e-12
