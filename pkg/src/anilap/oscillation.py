"""Oscillation decay across shrinking rectangles and Hölder exponent fits.

The decay rate delta is measured two ways: geometrically, from the
oscillation of a solution over rectangles shrinking by a fixed factor
Theta, and algebraically, from the contraction constant
kappa = (2 c_a 2^(1/p))^(-1) through (1 - kappa/2) = Theta^(-delta).
Pointwise regularity is fitted from sampled pairs in both the Euclidean
and the anisotropic gauge.
"""

import math

import numpy as np

from .errors import FitUnreliable, PreconditionViolation
from .geometry import metric_dist, rect
from .solver import Solution
from .supersolutions import default_integrability, require_certificate

__all__ = [
    "theory_delta",
    "oscillation_decay",
    "holder_fit",
]


def theory_delta(c_a, p, theta):
    """Decay exponent from the contraction constant.

    kappa = (2 c_a 2^(1/p))^(-1); delta solves (1 - kappa/2) = theta^(-delta).
    """
    if c_a <= 0 or p <= 0 or theta <= 1:
        raise PreconditionViolation("need c_a > 0, p > 0, theta > 1")
    kappa = 1.0 / (2.0 * c_a * 2.0 ** (1.0 / p))
    return {
        "kappa": kappa,
        "delta": math.log(2.0 / (2.0 - kappa)) / math.log(theta),
    }


def _ols_loglog(x, y):
    lx = np.log(np.asarray(x, float))
    ly = np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, _, _ = np.linalg.lstsq(A, ly, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    pred = A @ coef
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum((ly - pred) ** 2)) / ss_tot
    return slope, intercept, r2


def oscillation_decay(kernel, sol, x0=None, r=0.5, theta=8.0, lam=2.0,
                      sigma=1.25, c_a=2.0, p=0.1, scales=None,
                      osc_floor=1e-13):
    """Oscillation of u over M_{r theta^{-n}} and the fitted decay rate.

    Requires theta > lam > sigma > 1.  Scales stop once the rectangle
    holds fewer than 2 nodes per axis or the oscillation falls under
    osc_floor; fewer than 3 usable scales raises FitUnreliable (constant
    solutions short-circuit to the exact zero-oscillation report).
    """
    require_certificate(sol)
    if not (theta > lam > sigma > 1.0):
        raise PreconditionViolation("need theta > lam > sigma > 1")
    grid = sol.problem.grid
    aniso = kernel.aniso
    if x0 is None:
        x0 = np.zeros(grid.d)

    radii = []
    oscs = []
    n = 0
    while True:
        rn = r * theta ** (-n)
        if scales is not None and n >= scales:
            break
        try:
            sl = grid.slices_for(rect(aniso, x0, rn))
        except Exception:
            break
        block = sol.u.values[sl]
        if any(s <= 1 for s in block.shape):
            break
        radii.append(rn)
        oscs.append(float(block.max() - block.min()))
        n += 1

    radii = np.asarray(radii)
    oscs = np.asarray(oscs)
    theory = theory_delta(c_a, p, theta)

    # oscillation below the solver tolerance is indistinguishable from zero
    osc_floor = osc_floor + 10.0 * sol.problem.tol * float(
        np.max(np.abs(sol.u.values)))
    if oscs.size and float(np.max(oscs)) <= osc_floor:
        return {
            "radii": radii,
            "oscillations": oscs,
            "delta": None,
            "constant": True,
            "geometric": True,
            "rate": 0.0,
            **{"theory_" + k: v for k, v in theory.items()},
        }

    usable = oscs > osc_floor
    if int(np.sum(usable)) < 3:
        raise FitUnreliable(
            "only %d usable scales (need 3)" % int(np.sum(usable)))
    slope, intercept, r2 = _ols_loglog(radii[usable], oscs[usable])
    # osc ~ r^delta, so the log-log slope in r is delta itself
    delta = slope
    ratios = oscs[usable][1:] / oscs[usable][:-1]
    rate = float(np.max(ratios))
    return {
        "radii": radii,
        "oscillations": oscs,
        "delta": float(delta),
        "r2": r2,
        "constant": False,
        "rate": rate,
        "geometric": bool(rate < 1.0),
        **{"theory_" + k: v for k, v in theory.items()},
    }


def _pair_sample(grid, aniso, values, region_slices, count, rng, axis=None):
    idx = [np.arange(s.start, s.stop) for s in region_slices]
    shape = tuple(len(i) for i in idx)
    total = int(np.prod(shape))
    flat_x = rng.integers(total, size=count)
    flat_y = rng.integers(total, size=count)
    keep = flat_x != flat_y
    flat_x, flat_y = flat_x[keep], flat_y[keep]
    ix = np.unravel_index(flat_x, shape)
    iy = np.unravel_index(flat_y, shape)
    px = np.stack([grid.axes[k][idx[k][ix[k]]] for k in range(grid.d)], -1)
    py = np.stack([grid.axes[k][idx[k][iy[k]]] for k in range(grid.d)], -1)
    if axis is not None:
        same = np.ones(px.shape[0], dtype=bool)
        for k in range(grid.d):
            if k != axis:
                same &= ix[k] == iy[k]
        px, py = px[same], py[same]
        ix = tuple(c[same] for c in ix)
        iy = tuple(c[same] for c in iy)
    wx = tuple(idx[k][ix[k]] for k in range(grid.d))
    wy = tuple(idx[k][iy[k]] for k in range(grid.d))
    ux = values[wx]
    uy = values[wy]
    return px, py, ux, uy


def holder_fit(kernel, sol, r=0.5, pairs=4000, seed=0, q=None,
               diff_floor=1e-13):
    """Fitted growth exponents of |u(x) - u(y)| in both distance gauges.

    Least squares of log|du| against log of the Euclidean and the
    anisotropic gauge distance over sampled node pairs in M_r; also fits
    each axis separately (pairs differing in one coordinate only) and
    reports the prefactor normalization sup|u| + ||f||_q.  Constant
    solutions are reported exactly with no exponent.
    """
    require_certificate(sol)
    grid = sol.problem.grid
    aniso = kernel.aniso
    if q is None:
        q = default_integrability(aniso)
    rng = np.random.default_rng(seed)
    sl = grid.slices_for(rect(aniso, np.zeros(grid.d), r))

    # differences below the solver tolerance are noise, not structure
    diff_floor = diff_floor + 10.0 * sol.problem.tol * float(
        np.max(np.abs(sol.u.values)))
    block = sol.u.values[sl]
    if float(block.max() - block.min()) <= diff_floor:
        return {"constant": True, "euclid": None, "metric": None}

    px, py, ux, uy = _pair_sample(grid, aniso, sol.u.values, sl, pairs, rng)
    du = np.abs(ux - uy)
    keep = du > diff_floor
    if int(np.sum(keep)) < 10:
        raise FitUnreliable("not enough distinct-value pairs")
    px, py, du = px[keep], py[keep], du[keep]

    eu = np.sqrt(np.sum((px - py) ** 2, axis=-1))
    me = metric_dist(aniso, px, py)
    pos = me > 0
    e_slope, e_int, e_r2 = _ols_loglog(eu[pos], du[pos])
    m_slope, m_int, m_r2 = _ols_loglog(me[pos], du[pos])

    f_win = np.zeros(grid.window_shape)
    grid.interior_view(f_win)[...] = sol.problem.rhs_interior()
    near = f_win[grid.slices_for(rect(aniso, np.zeros(grid.d), 15.0 / 16.0))]
    fnorm = float((np.sum(np.abs(near) ** q) * grid.cell_volume) ** (1.0 / q))
    scale = float(np.max(np.abs(sol.u.values))) + fnorm

    axis_exponents = []
    for k in range(grid.d):
        pxa, pya, uxa, uya = _pair_sample(
            grid, aniso, sol.u.values, sl, 20 * pairs, rng, axis=k)
        dua = np.abs(uxa - uya)
        ka = dua > diff_floor
        if int(np.sum(ka)) < 10:
            axis_exponents.append(None)
            continue
        da = np.abs(pxa[ka, k] - pya[ka, k])
        s, _, _ = _ols_loglog(da, dua[ka])
        axis_exponents.append(float(s))

    return {
        "constant": False,
        "euclid": e_slope,
        "euclid_r2": e_r2,
        "metric": m_slope,
        "metric_r2": m_r2,
        "prefactor_scale": scale,
        "gauge_floor": e_slope * aniso.alpha_min / aniso.alpha_max,
        "axis_exponents": axis_exponents,
        "pairs_used": int(np.sum(keep)),
    }
