import numpy as np
import pytest

from anilap.errors import (BoundaryStencilError, OrderFitUnreliable,
                           QuadratureResolutionError, SpectralPathUnavailable)
from anilap.geometry import Anisotropy, rect
from anilap.grids import Constant, GridFunction, TensorGrid
from anilap.kernels import AxesKernel, ModulatedAxesKernel, coeff_checkerboard
from anilap.operator import (OperatorStencil, Undefined, apply_operator,
                             axis_weights, consistency_order, cos_apply_study,
                             multiplier, spectral_apply, symbol,
                             symbol_constant, symbol_constant_quadrature)


def test_symbol_constant_against_quadrature():
    for a in (0.3, 0.7, 1.0, 1.3, 1.7, 1.95):
        closed = float(symbol_constant(a))
        slow = symbol_constant_quadrature(a)
        assert closed == pytest.approx(slow, rel=1e-7)


def test_symbol_constant_landmarks():
    assert float(symbol_constant(1.0)) == pytest.approx(np.pi, rel=1e-15)
    assert float(symbol_constant(1e-9)) == pytest.approx(4.0, rel=1e-6)
    assert float(symbol_constant(2.0 - 1e-9)) == pytest.approx(2.0, rel=1e-6)


def test_symbol_sums_axis_terms(aniso, rng):
    xi = rng.standard_normal((7, 2))
    manual = sum(float(symbol_constant(a)) * np.abs(xi[:, k]) ** a
                 for k, a in enumerate(aniso.alpha))
    assert np.allclose(symbol(aniso, xi), manual, rtol=1e-14)
    manual_m = sum(np.abs(xi[:, k]) ** a for k, a in enumerate(aniso.alpha))
    assert np.allclose(multiplier(aniso, xi), manual_m, rtol=1e-14)


def test_axis_weights_positive_across_orders():
    # the centroid correction overshoots near order 2; the fallback must
    # keep every weight positive on the whole admissible range
    for a in (0.3, 0.9, 1.5, 1.65, 1.8, 1.95):
        K = AxesKernel(Anisotropy((a,)))
        for h in (1.0 / 8, 1.0 / 64):
            w = axis_weights(K, 0, h, 50)
            assert w.shape == (50,)
            assert np.all(w > 0.0)


def test_axis_weights_plain_mass(kernel):
    h, count = 0.125, 40
    w = axis_weights(kernel, 0, h, count, corrected=False)
    cells = float(kernel.axis_cell_integral(0, h / 2.0, (count + 0.5) * h))
    fold = float(kernel.axis_singular_moment(0, h / 2.0)) / h ** 2
    assert w.sum() == pytest.approx(cells + fold, rel=1e-12)


def test_axis_weights_needs_cells(kernel):
    with pytest.raises(QuadratureResolutionError):
        axis_weights(kernel, 0, 0.1, 0)


def test_stencil_rejects_modulated(grid, aniso):
    K = ModulatedAxesKernel(aniso, coeff_checkerboard())
    with pytest.raises(TypeError):
        OperatorStencil(grid, K)


def test_operator_annihilates_constants(grid, kernel):
    ones = np.ones(grid.window_shape)
    # window-truncated: weights exactly balance the in-window measure
    u = GridFunction(grid, ones, exterior=Undefined())
    res = apply_operator(u, kernel)
    assert np.max(np.abs(res)) < 1e-12
    # globally constant: far tails cancel the remaining mass
    u = GridFunction(grid, ones, exterior=Constant(1.0))
    res = apply_operator(u, kernel)
    assert np.max(np.abs(res)) < 1e-12


def test_truncated_apply_guards(aniso, kernel):
    g0 = TensorGrid.for_rect(aniso, rect(aniso, (0.0, 0.0), 1.0), 9, pad_cells=0)
    u = GridFunction(g0, np.zeros(g0.window_shape), exterior=Undefined())
    with pytest.raises(BoundaryStencilError):
        apply_operator(u, kernel)  # no stored ring around the interior
    g1 = TensorGrid.for_rect(aniso, rect(aniso, (0.0, 0.0), 1.0), 9, pad_cells=2)
    u = GridFunction(g1, np.zeros(g1.window_shape), exterior=Undefined())
    with pytest.raises(BoundaryStencilError):
        apply_operator(u, kernel, out="window")


def test_spectral_apply_pure_wave():
    a = Anisotropy((1.0,))
    g = TensorGrid.periodic_cell(a, ((-np.pi, np.pi),), 64)
    u = GridFunction(g, np.cos(g.mesh()[..., 0]))
    got = spectral_apply(u, a)
    # the symbol at frequency 1 is exactly pi, and the FFT is exact on a
    # resolved harmonic
    assert np.allclose(got, -np.pi * u.values, atol=1e-12)


def test_spectral_apply_guards(aniso, grid):
    u = GridFunction(grid, np.zeros(grid.window_shape))
    with pytest.raises(SpectralPathUnavailable):
        spectral_apply(u, aniso)  # grid is not periodic
    g = TensorGrid.periodic_cell(aniso, ((-1.0, 1.0), (-1.0, 1.0)), 16)
    v = GridFunction(g, np.zeros(g.window_shape))
    with pytest.raises(SpectralPathUnavailable):
        spectral_apply(v, ModulatedAxesKernel(aniso, coeff_checkerboard()))
    with pytest.raises(SpectralPathUnavailable):
        spectral_apply(v, 1.5)


def test_cos_apply_converges():
    out = cos_apply_study(1.0, sizes=(64, 128))
    assert out["error"][-1] < out["error"][0]
    assert out["error"][-1] < 0.05
    assert out["order"] > 0.5


def test_consistency_order_fit():
    hs = np.array([0.1, 0.05, 0.025, 0.0125])
    out = consistency_order(hs, hs ** 1.5)
    assert out["order"] == pytest.approx(1.5, abs=1e-12)
    assert out["r2"] == pytest.approx(1.0, abs=1e-12)


def test_consistency_order_guards():
    with pytest.raises(OrderFitUnreliable):
        consistency_order([0.1, 0.05], [1e-3, 2e-3])  # grows under refinement
    with pytest.raises(OrderFitUnreliable):
        consistency_order([0.1, 0.05], [1e-3, 0.0])
    with pytest.raises(OrderFitUnreliable):
        consistency_order([0.1], [1e-3])
