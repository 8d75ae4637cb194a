import numpy as np
import pytest

from anilap.geometry import Anisotropy, rect
from anilap.kernels import (AxesKernel, IsotropicKernel, ModulatedAxesKernel,
                            check_levy_integrability, check_symmetry,
                            coeff_bump, coeff_checkerboard, coeff_constant,
                            coeff_onesided, comparability_estimate, tail_mass)


def test_levy_anchor_exact(rng):
    # int (|h|^2 ^ 1) d mu_axes = 4d for every order vector
    for d in (1, 2, 3):
        for _ in range(4):
            a = Anisotropy(tuple(rng.uniform(0.2, 1.9, size=d)))
            worst = check_levy_integrability(AxesKernel(a))
            assert worst == pytest.approx(4.0 * d, abs=1e-9)


def test_levy_anchor_modulated_bounded(aniso):
    # a bounded coefficient scales the anchor by at most its sup
    K = ModulatedAxesKernel(aniso, coeff_checkerboard())
    worst = check_levy_integrability(K)
    assert worst <= 2.0 * 4.0 * aniso.d + 1e-9


def test_symmetry_axes(kernel, aniso):
    # boxes offset along a single axis; the axes kernel charges the move
    base = rect(aniso, (0.0, 0.0), 0.25)
    shifted = rect(aniso, (2.5 * base.half_widths[0], 0.0), 0.25)
    iab, iba, gap = check_symmetry(kernel, base, shifted)
    assert iab > 0.0
    assert gap < 1e-10


def test_symmetry_diagonal_boxes_uncharged(kernel, aniso):
    # diagonal moves carry no axes-kernel mass, both integrals vanish
    base = rect(aniso, (0.0, 0.0), 0.25)
    diag = rect(aniso, (3.0 * base.half_widths[0],
                        5.0 * base.half_widths[1]), 0.25)
    iab, iba, _ = check_symmetry(kernel, base, diag)
    assert iab == 0.0
    assert iba == 0.0


def test_comparability_constant_coeff(aniso):
    K = ModulatedAxesKernel(aniso, coeff_constant(1.0))
    lo, hi = comparability_estimate(K, rect(aniso, (0.0, 0.0), 0.5))
    assert lo == pytest.approx(1.0, rel=1e-10)
    assert hi == pytest.approx(1.0, rel=1e-10)


def test_comparability_brackets_one(aniso):
    K = ModulatedAxesKernel(aniso, coeff_checkerboard())
    lo, hi = comparability_estimate(K, rect(aniso, (0.0, 0.0), 0.5))
    assert 0.0 < lo <= hi
    assert lo <= 2.0 and hi >= 0.5  # coefficient range [1/2, 2] brackets these


def test_coefficient_catalog_positive(rng):
    pts = rng.uniform(-3, 3, size=(200, 2))
    for coeff in (coeff_constant(0.7), coeff_checkerboard(), coeff_bump(),
                  coeff_onesided()):
        vals = np.asarray([coeff(x, y) for x, y in zip(pts, pts[::-1])])
        assert np.all(vals > 0.0)
        assert np.all(np.isfinite(vals))


def test_tail_mass_monotone(kernel, aniso):
    x = np.zeros(2)
    small = tail_mass(kernel, x, rect(aniso, (0.0, 0.0), 0.25))
    big = tail_mass(kernel, x, rect(aniso, (0.0, 0.0), 0.5))
    assert small > big > 0.0


def test_isotropic_kernel_basics():
    with pytest.raises(ValueError):
        IsotropicKernel(2, 2.0)
    K = IsotropicKernel(2, 0.8)
    x = np.zeros(2)
    y = np.array([0.3, 0.4])
    assert K.density_eval(x, y) == pytest.approx(0.5 ** (-2.8), rel=1e-12)
    assert check_levy_integrability(K) < np.inf


def test_axis_cell_integral_matches_density(kernel, rng):
    # closed form against direct quadrature of alpha(2-alpha)|t|^(-1-alpha)
    from scipy import integrate
    for k in (0, 1):
        a = kernel.aniso.alpha[k]
        lo, hi = sorted(rng.uniform(0.1, 5.0, size=2))
        exact = integrate.quad(
            lambda t: a * (2.0 - a) * t ** (-1.0 - a), lo, hi)[0]
        got = float(np.asarray(kernel.axis_cell_integral(k, lo, hi)))
        assert got == pytest.approx(exact, rel=1e-10)
