"""Quadratic forms: bilinear energy, V/H norms, cutoffs, carre du champ.

All pair sums use the same folded axis weights as the operator module, so the
discrete duality  E(u, hat_i) = -2 * vol * (L_h u)(i)  holds exactly; the
solver and the verification path rely on that identity.

Conventions:
  * energy over a region counts ordered pairs with both endpoints inside;
  * whole-space energy adds exterior cross terms twice (both orders);
  * the V-seminorm integrates x over the region and y over everything, so
    exterior tails enter once.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidQuery, SupportViolation, WindowError
from .geometry import AnisoRect, rect
from .grids import (
    BoxData,
    Constant,
    GridFunction,
    TensorGrid,
    Zero,
    as_exterior,
    require_supported_inside,
)
from .kernels import AxesKernel, ModulatedAxesKernel
from .operator import OperatorStencil, axis_weights

__all__ = [
    "energy_form",
    "norms",
    "NormBundle",
    "pair_functional",
    "second_moment_field",
    "carre_du_champ",
    "CutoffSpec",
    "build_cutoff",
    "cutoff_bounds",
    "CutoffBounds",
    "periodic_energy",
    "fourier_energy",
    "multiplier_comparability",
]


# --- helpers ----------------------------------------------------------------

def _region_slices(grid, region):
    if region is None:
        return tuple(slice(0, n) for n in grid.window_shape)
    if isinstance(region, AnisoRect):
        return grid.slices_for(region)
    return tuple(region)


def _mask(grid, slices):
    m = np.zeros(grid.window_shape, dtype=float)
    m[slices] = 1.0
    return m


def _joint_tail(stencil, ext_u, ext_v):
    """sum over axes/sides of int g_u * g_v dmu beyond the window."""
    if isinstance(ext_u, Zero) or isinstance(ext_v, Zero):
        return 0.0
    if ext_u is ext_v:
        return stencil.policy_tails(ext_u, power=2)
    if isinstance(ext_u, Constant):
        return ext_u.c * stencil.policy_tails(ext_v, power=1)
    if isinstance(ext_v, Constant):
        return ext_v.c * stencil.policy_tails(ext_u, power=1)
    raise InvalidQuery("joint exterior moments need matching or constant data")


# --- bilinear energy ---------------------------------------------------------

def energy_form(kernel, region, u: GridFunction, v: GridFunction = None):
    """Double-sum quadrature of the pair energy over ``region`` (None = all space).

    Ordered node pairs along axis lines, folded weights, cell volume factor.
    With region=None exterior tails are included via the functions' exterior
    data, counted for both pair orders.
    """
    if v is None:
        v = u
    if u.grid is not v.grid:
        raise InvalidQuery("energy_form needs both functions on one grid")
    grid = u.grid
    if isinstance(kernel, ModulatedAxesKernel):
        return _energy_modulated(kernel, region, u, v)
    st = OperatorStencil(grid, kernel)
    sl = _region_slices(grid, region)
    chi = _mask(grid, sl)
    U, V = u.values * chi, v.values * chi
    s_uv = st.neighbor_sum(U * V)
    s_u = st.neighbor_sum(U)
    s_v = st.neighbor_sum(V)
    s_1 = st.neighbor_sum(chi)
    field = s_uv - U * s_v - V * s_u + U * V * s_1
    total = float(np.sum(field[sl]))
    if region is None:
        # exterior cross terms, both pair orders
        t1u = st.policy_tails(u.exterior, power=1)
        t1v = st.policy_tails(v.exterior, power=1)
        tm = st.measure_field(truncated=False) - st.measure_field(truncated=True)
        juv = _joint_tail(st, u.exterior, v.exterior)
        cross = juv - u.values * t1v - v.values * t1u + u.values * v.values * tm
        total += 2.0 * float(np.sum(cross))
    return grid.cell_volume * total


def _energy_modulated(kernel, region, u, v):
    """Offset-loop pair sum with the pairwise coefficient; small grids only."""
    grid = u.grid
    sl = _region_slices(grid, region)
    if region is None:
        if not (isinstance(u.exterior, Zero) and isinstance(v.exterior, Zero)):
            raise InvalidQuery(
                "whole-space modulated energy needs zero exterior data")
    coeff = kernel.coeff
    total = 0.0
    mesh = grid.mesh()
    chi = _mask(grid, sl).astype(bool)
    for k in range(grid.d):
        n = grid.window_shape[k]
        w = axis_weights(kernel, k, grid.h[k], n - 1)
        for j in range(1, n):
            for sgn in (+1, -1):
                src = [slice(None)] * grid.d
                dst = [slice(None)] * grid.d
                if sgn > 0:
                    src[k] = slice(j, n)
                    dst[k] = slice(0, n - j)
                else:
                    src[k] = slice(0, n - j)
                    dst[k] = slice(j, n)
                src, dst = tuple(src), tuple(dst)
                pair_ok = chi[dst] & chi[src]
                if not np.any(pair_ok):
                    continue
                du = (u.values[src] - u.values[dst])[pair_ok]
                dv = (v.values[src] - v.values[dst])[pair_ok]
                a = coeff(mesh[dst][pair_ok], mesh[src][pair_ok])
                total += w[j - 1] * float(np.sum(a * du * dv))
    return grid.cell_volume * total


# --- norms -------------------------------------------------------------------

class NormBundle:
    """V-seminorm^2 and H-norm^2 (unpacks as that pair) plus bookkeeping."""

    def __init__(self, v2, h2, l2, tail_term):
        self.v2 = float(v2)
        self.h2 = float(h2)
        self.l2 = float(l2)
        self.tail_term = float(tail_term)

    def __iter__(self):
        return iter((self.v2, self.h2))

    def __repr__(self):
        return f"NormBundle(v2={self.v2!r}, h2={self.h2!r}, l2={self.l2!r})"


def second_moment_field(u: GridFunction, kernel, stencil=None, tails=True):
    """G(x) = sum over axes/offsets/sides of (u(y)-u(x))^2 weights; window field."""
    st = stencil or OperatorStencil(u.grid, kernel)
    W = st.measure_field(truncated=True)
    s_u = st.neighbor_sum(u.values)
    s_u2 = st.neighbor_sum(u.values ** 2)
    G = s_u2 - 2.0 * u.values * s_u + u.values ** 2 * W
    if tails:
        tm = st.measure_field(truncated=False) - W
        t1 = st.policy_tails(u.exterior, power=1)
        t2 = st.policy_tails(u.exterior, power=2)
        G = G + t2 - 2.0 * u.values * t1 + u.values ** 2 * tm
    return G


def norms(kernel, region, u: GridFunction):
    """V-seminorm^2 (x in region, y anywhere) and whole-space H-norm^2.

    The H-norm requires u to vanish outside the region (SupportViolation
    otherwise); its nonlocal part counts ordered pairs over all space.
    """
    grid = u.grid
    sl = _region_slices(grid, region)
    st = OperatorStencil(grid, kernel)
    G = second_moment_field(u, kernel, stencil=st, tails=True)
    tails_only = G - second_moment_field(u, kernel, stencil=st, tails=False)
    vol = grid.cell_volume
    v2 = vol * float(np.sum(G[sl]))
    tail_term = vol * float(np.sum(tails_only[sl]))
    l2 = vol * float(np.sum(u.values[sl] ** 2))
    if region is not None:
        require_supported_inside(u, region)
    h2 = l2 + energy_form(kernel, None, u, u)
    return NormBundle(v2, h2, l2, tail_term)


def pair_functional(u: GridFunction, kernel, F, region, region_y=None):
    """sum_{x in Rx} vol * sum over axis offsets with y in Ry of w~ * F(u(x), u(y)).

    F must be vectorized over (values_x, values_y).  Exterior tails are not
    included; both regions must lie in the stored window.
    """
    grid = u.grid
    slx = _region_slices(grid, region)
    sly = _region_slices(grid, region_y if region_y is not None else region)
    total = 0.0
    for k in range(grid.d):
        n = grid.window_shape[k]
        w = axis_weights(kernel, k, grid.h[k], n - 1)
        x0, x1 = slx[k].start, slx[k].stop
        y0, y1 = sly[k].start, sly[k].stop
        # other-axes overlap of Rx and Ry
        cross = []
        for a in range(grid.d):
            if a == k:
                cross.append(None)
            else:
                lo = max(slx[a].start, sly[a].start)
                hi = min(slx[a].stop, sly[a].stop)
                if hi <= lo:
                    cross.append(slice(0, 0))
                else:
                    cross.append(slice(lo, hi))
        span = max(x1 - 1, y1 - 1) - min(x0, y0)
        for j in range(1, span + 1):
            for sgn in (+1, -1):
                # x_k range so that x_k + sgn*j lands in [y0, y1)
                lo = max(x0, y0 - sgn * j)
                hi = min(x1, y1 - sgn * j)
                if hi <= lo:
                    continue
                src = list(cross)
                dst = list(cross)
                dst[k] = slice(lo, hi)
                src[k] = slice(lo + sgn * j, hi + sgn * j)
                ux = u.values[tuple(dst)]
                uy = u.values[tuple(src)]
                total += w[j - 1] * float(np.sum(F(ux, uy)))
    return grid.cell_volume * total


# --- cutoff functions ---------------------------------------------------------

@dataclass
class CutoffSpec:
    """Product-trapezoid cutoff: 1 on M_r(center), 0 outside M_{lam*r}(center)."""

    center: tuple
    r: float
    lam: float

    def inner_rect(self, aniso):
        return AnisoRect(aniso, tuple(self.center), self.r)

    def outer_rect(self, aniso):
        return AnisoRect(aniso, tuple(self.center), self.lam * self.r)

    def slope_budget(self, aniso):
        """Allowed per-axis slope 2 / ((lam^e_k - 1) r^e_k)."""
        e = aniso.exponents()
        return tuple(2.0 / ((self.lam ** ek - 1.0) * self.r ** ek) for ek in e)


def _mollified_ramp(s, plateau, width, cell):
    """1 on [0, plateau], linear drop over `width`, one-cell box mollification.

    Piecewise quadratic and C^1; slope bounded by 1/width.
    """
    s = np.abs(np.asarray(s, dtype=float))
    p, W, h = plateau, width, cell
    out = np.zeros_like(s)
    out[s <= p - h / 2] = 1.0
    m = (s > p - h / 2) & (s <= p + h / 2)
    out[m] = 1.0 - (s[m] - p + h / 2) ** 2 / (2.0 * h * W)
    m = (s > p + h / 2) & (s <= p + W - h / 2)
    out[m] = 1.0 - (s[m] - p) / W
    m = (s > p + W - h / 2) & (s <= p + W + h / 2)
    out[m] = (p + W + h / 2 - s[m]) ** 2 / (2.0 * h * W)
    return out


def build_cutoff(spec: CutoffSpec, grid: TensorGrid):
    """Materialize the cutoff on a grid; exact zero exterior.

    Per axis: plateau p_k = r^e_k + h_k, ramp width w_k - 2 h_k, one-cell
    mollification.  The profile is 1 on the closed inner rectangle and 0
    outside the open outer one, with slopes within half the allowed budget.
    """
    aniso = grid.aniso
    e = aniso.exponents()
    vals = np.ones(grid.window_shape)
    for k in range(grid.d):
        a_k = spec.r ** e[k]
        b_k = (spec.lam * spec.r) ** e[k]
        w_k = b_k - a_k
        h = grid.h[k]
        if w_k < 4.0 * h:
            raise WindowError(
                f"axis {k}: ramp width {w_k:.3g} under 4 cells (h={h:.3g}); "
                "slope budget unreachable after one-cell mollification")
        lo, hi = grid.window_bounds()[k]
        if spec.center[k] - b_k < lo or spec.center[k] + b_k > hi:
            raise WindowError(f"axis {k}: window does not cover the outer rectangle")
        prof = _mollified_ramp(grid.axes[k] - spec.center[k],
                               plateau=a_k + h, width=w_k - 2.0 * h, cell=h)
        shape = [1] * grid.d
        shape[k] = -1
        vals = vals * prof.reshape(shape)
    return GridFunction(grid, vals, exterior="zero")


def carre_du_champ(tau: GridFunction, kernel):
    """Pointwise int (tau(y)-tau(x))^2 mu(x, dy) on the window."""
    return second_moment_field(tau, kernel, tails=True)


class CutoffBounds(tuple):
    """(measured sup-carre, bound) pair with extra diagnostic attributes."""

    def __new__(cls, measured, bound, **extra):
        obj = super().__new__(cls, (float(measured), float(bound)))
        obj.measured = float(measured)
        obj.bound = float(bound)
        for key, val in extra.items():
            setattr(obj, key, val)
        return obj


def cutoff_bound_value(aniso, r, lam):
    """8 r^{-alpha_max} sum_k (lam^{alpha_max/alpha_k} - 1)^{-alpha_k}."""
    e = aniso.exponents()
    s = sum((lam ** ek - 1.0) ** (-ak) for ek, ak in zip(e, aniso.alpha))
    return 8.0 * r ** (-aniso.alpha_max) * s


def cutoff_bounds(kernel, spec: CutoffSpec, grid=None, u=None, n=65):
    """Measured sup carre-du-champ of the cutoff vs the scale-explicit bound.

    Optionally also evaluates, for a supplied u on the same grid, the
    localization tail product sum_{x in outer} u^2 tau^2 * (mass escaping the
    outer rectangle) against the same bound times ||u||_L2^2.
    """
    aniso = kernel.aniso
    if grid is None:
        outer = spec.outer_rect(aniso)
        grid = TensorGrid.for_rect(aniso, outer, n, pad_cells=8)
    tau = build_cutoff(spec, grid)
    gamma = carre_du_champ(tau, kernel)
    measured = float(np.max(gamma))
    bound = cutoff_bound_value(aniso, spec.r, spec.lam)
    slopes = []
    for k in range(grid.d):
        g = np.gradient(tau.values, grid.axes[k], axis=k)
        slopes.append(float(np.max(np.abs(g))))
    extra = {
        "slopes": tuple(slopes),
        "slope_budget": spec.slope_budget(aniso),
        "ok": measured <= bound,
        "tau": tau,
        "grid": grid,
    }
    if u is not None:
        outer = spec.outer_rect(aniso)
        sl = grid.slices_for(outer)
        from .kernels import tail_mass

        mesh = grid.mesh(sl)
        flat = mesh.reshape(-1, grid.d)
        esc = np.array([tail_mass(kernel, x, outer) for x in flat])
        esc = esc.reshape(mesh.shape[:-1])
        uu = u.values[sl] if isinstance(u, GridFunction) else np.asarray(u)[sl]
        tt = tau.values[sl]
        prod = grid.cell_volume * float(np.sum(uu ** 2 * tt ** 2 * esc))
        l2 = grid.cell_volume * float(np.sum(uu ** 2))
        extra["tail_product"] = prod
        extra["tail_product_bound"] = bound * l2
    return CutoffBounds(measured, bound, **extra)


# --- periodic comparability ---------------------------------------------------

def periodic_energy(u: GridFunction, kernel):
    """Pair energy on a periodic grid (kernel periodized over one period)."""
    grid = u.grid
    if not grid.periodic:
        raise InvalidQuery("periodic energy needs a periodic grid")
    vals = u.values
    total_field = np.zeros_like(vals)
    for k in range(grid.d):
        n = grid.window_shape[k]
        w = axis_weights(kernel, k, grid.h[k], n - 1)
        kc = np.zeros(n)
        kc[1:] = w + w[::-1]
        Kf = np.fft.fft(kc)
        shape = [1] * grid.d
        shape[k] = -1
        Kf = Kf.reshape(shape)
        s_u = np.real(np.fft.ifft(np.fft.fft(vals, axis=k) * Kf, axis=k))
        s_u2 = np.real(np.fft.ifft(np.fft.fft(vals ** 2, axis=k) * Kf, axis=k))
        wsum = float(np.sum(kc))
        total_field += s_u2 - 2.0 * vals * s_u + wsum * vals ** 2
    return grid.cell_volume * float(np.sum(total_field))


def fourier_energy(u: GridFunction, aniso):
    """2 * vol/N * sum_xi m(xi) |u_hat(xi)|^2 on a periodic grid."""
    grid = u.grid
    if not grid.periodic:
        raise InvalidQuery("fourier energy needs a periodic grid")
    uh = np.fft.fftn(u.values)
    m = np.zeros(grid.window_shape)
    from .operator import symbol_constant

    for k in range(grid.d):
        f = 2.0 * np.pi * np.fft.fftfreq(grid.window_shape[k], d=grid.h[k])
        shape = [1] * grid.d
        shape[k] = -1
        m = m + symbol_constant(aniso.alpha[k]) * np.abs(f.reshape(shape)) ** aniso.alpha[k]
    N = float(np.prod(grid.window_shape))
    return 2.0 * grid.cell_volume / N * float(np.sum(m * np.abs(uh) ** 2))


def multiplier_comparability(aniso, n=64, trials=6, seed=0, box_half=4.0):
    """Measured two-sided constant between pair energy and the Fourier side.

    Returns dict with the per-trial ratios and C = max(ratio, 1/ratio).
    """
    rng = np.random.default_rng(seed)
    bounds = tuple((-box_half, box_half) for _ in range(aniso.d))
    grid = TensorGrid.periodic_cell(aniso, bounds, n)
    kernel = AxesKernel(aniso)
    ratios = []
    mesh = grid.mesh()
    for t in range(trials):
        # random smooth periodic field: a few low modes
        vals = np.zeros(grid.window_shape)
        for _ in range(4):
            kvec = rng.integers(1, 5, size=aniso.d)
            phase = rng.uniform(0, 2 * np.pi, size=aniso.d + 1)
            arg = phase[0]
            for k in range(aniso.d):
                arg = arg + kvec[k] * np.pi / box_half * mesh[..., k]
            vals += rng.normal() * np.cos(arg + phase[1])
        u = GridFunction(grid, vals, exterior="zero")
        e = periodic_energy(u, kernel)
        f = fourier_energy(u, aniso)
        ratios.append(e / f)
    ratios = np.asarray(ratios)
    C = float(np.max(np.maximum(ratios, 1.0 / ratios)))
    return {"ratios": ratios.tolist(), "constant": C}
