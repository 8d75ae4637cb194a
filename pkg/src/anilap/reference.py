"""Slow literal-loop twins of the energy and norm quadratures.

Everything here recomputes weights and tail integrals from scratch with
scalar arithmetic and explicit Python loops over node pairs.  The fast
vectorized paths are validated against these on small grids; keep the
two implementations independent so a shared bug cannot hide.
"""

import math

import numpy as np

from .errors import InvalidQuery, SupportViolation
from .geometry import AnisoRect
from .grids import BoxData, Constant, ExteriorSum, GridFunction, Zero
from .kernels import ModulatedAxesKernel

__all__ = [
    "brute_weight",
    "brute_energy",
    "brute_norms",
]


def _cell_mass(alpha, lo, hi):
    return (2.0 - alpha) * (lo ** -alpha - hi ** -alpha)


def _cell_first_moment(alpha, lo, hi):
    if abs(alpha - 1.0) < 1e-14:
        return alpha * (2.0 - alpha) * math.log(hi / lo)
    return (alpha * (2.0 - alpha)
            * (hi ** (1.0 - alpha) - lo ** (1.0 - alpha)) / (1.0 - alpha))


def _tail_mass(alpha, T):
    return (2.0 - alpha) * T ** -alpha


def _centroid_shift(alpha, h, count, i):
    if i < 1 or i > count:
        return 0.0
    lo, hi = (i - 0.5) * h, (i + 0.5) * h
    return (_cell_first_moment(alpha, lo, hi)
            - i * h * _cell_mass(alpha, lo, hi))


def _corrected_weight(alpha, h, j, count):
    lo, hi = (j - 0.5) * h, (j + 0.5) * h
    w = _cell_mass(alpha, lo, hi)
    w += (_centroid_shift(alpha, h, count, j - 1)
          - _centroid_shift(alpha, h, count, j + 1)) / (2.0 * h)
    if j == 1:
        # curvature weight of the singular cell around the origin
        w += alpha * (h / 2.0) ** (2.0 - alpha) / h ** 2
    return w


def brute_weight(alpha, h, j, count):
    """Cell weight for offset j out of count, scalar arithmetic.

    Centroid-corrected when every corrected weight stays positive, else
    the plain midpoint rule (the correction overshoots near order 2).
    """
    if all(_corrected_weight(alpha, h, i, count) > 0.0
           for i in range(1, count + 1)):
        return _corrected_weight(alpha, h, j, count)
    w = _cell_mass(alpha, (j - 0.5) * h, (j + 0.5) * h)
    if j == 1:
        w += alpha * (h / 2.0) ** (2.0 - alpha) / h ** 2
    return w


def _region_tuples(grid, region):
    if region is None:
        sl = tuple(slice(0, n) for n in grid.window_shape)
    elif isinstance(region, AnisoRect):
        sl = grid.slices_for(region)
    else:
        sl = tuple(region)
    import itertools
    return sl, set(itertools.product(*(range(s.start, s.stop) for s in sl)))


def _fiber(exterior, alpha, x, k, side, T, power):
    """Closed-form integral of g(x + side t e_k)^power density(t) dt, t >= T."""
    if isinstance(exterior, Zero):
        return 0.0
    if isinstance(exterior, Constant):
        return exterior.c ** power * _tail_mass(alpha, T)
    if isinstance(exterior, ExteriorSum):
        return sum(_fiber(item, alpha, x, k, side, T, power)
                   for item in exterior.items)
    if isinstance(exterior, BoxData):
        for a, (lo, hi) in enumerate(exterior.bounds):
            if a != k and not lo <= x[a] <= hi:
                return 0.0
        lo, hi = exterior.bounds[k]
        if side > 0:
            tlo, thi = lo - x[k], hi - x[k]
        else:
            tlo, thi = x[k] - hi, x[k] - lo
        tlo = max(tlo, T)
        if thi <= tlo:
            return 0.0
        upper = 0.0 if math.isinf(thi) else (2.0 - alpha) * thi ** -alpha
        return exterior.height ** power \
            * ((2.0 - alpha) * tlo ** -alpha - upper)
    raise InvalidQuery("reference tails support catalog data only")


def _joint_fiber(ext_u, ext_v, alpha, x, k, side, T):
    if isinstance(ext_u, Zero) or isinstance(ext_v, Zero):
        return 0.0
    if ext_u is ext_v:
        return _fiber(ext_u, alpha, x, k, side, T, 2)
    if isinstance(ext_u, Constant):
        return ext_u.c * _fiber(ext_v, alpha, x, k, side, T, 1)
    if isinstance(ext_v, Constant):
        return ext_v.c * _fiber(ext_u, alpha, x, k, side, T, 1)
    raise InvalidQuery("joint exterior moments need matching or constant data")


def _node_point(grid, idx):
    return tuple(grid.axes[a][idx[a]] for a in range(grid.d))


def _tail_T(grid, idx, k, side):
    n = grid.window_shape[k]
    i = idx[k] if side < 0 else n - 1 - idx[k]
    return (i + 0.5) * grid.h[k]


def brute_energy(kernel, region, u: GridFunction, v: GridFunction = None):
    """Ordered-pair double sum; region=None adds exterior tails twice."""
    if v is None:
        v = u
    grid = u.grid
    aniso = kernel.aniso
    modulated = isinstance(kernel, ModulatedAxesKernel)
    coeff = kernel.coeff if modulated else None
    if modulated and region is None:
        if not (isinstance(u.exterior, Zero) and isinstance(v.exterior, Zero)):
            raise InvalidQuery(
                "whole-space modulated energy needs zero exterior data")
    sl, inside = _region_tuples(grid, region)
    import itertools
    window = list(itertools.product(*(range(n) for n in grid.window_shape)))

    total = 0.0
    for x in window:
        if x not in inside:
            continue
        ux, vx = u.values[x], v.values[x]
        for k in range(grid.d):
            n = grid.window_shape[k]
            count = n - 1
            for j in range(1, n):
                w = brute_weight(aniso.alpha[k], grid.h[k], j, count)
                for sgn in (1, -1):
                    yk = x[k] + sgn * j
                    if not 0 <= yk < n:
                        continue
                    y = x[:k] + (yk,) + x[k + 1:]
                    if y not in inside:
                        continue
                    du = u.values[y] - ux
                    dv = v.values[y] - vx
                    piece = w * du * dv
                    if modulated:
                        piece *= float(coeff(
                            np.asarray(_node_point(grid, x)),
                            np.asarray(_node_point(grid, y))))
                    total += piece

    if region is None:
        for x in window:
            ux, vx = u.values[x], v.values[x]
            pt = _node_point(grid, x)
            for k in range(grid.d):
                a = aniso.alpha[k]
                for side in (-1, 1):
                    T = _tail_T(grid, x, k, side)
                    juv = _joint_fiber(u.exterior, v.exterior, a, pt, k,
                                       side, T)
                    t1v = _fiber(v.exterior, a, pt, k, side, T, 1)
                    t1u = _fiber(u.exterior, a, pt, k, side, T, 1)
                    tm = _tail_mass(a, T)
                    total += 2.0 * (juv - ux * t1v - vx * t1u + ux * vx * tm)
    return grid.cell_volume * total


def brute_norms(kernel, region, u: GridFunction):
    """(v_seminorm^2, h_norm^2) by literal loops; mirrors norms() semantics."""
    grid = u.grid
    aniso = kernel.aniso
    sl, inside = _region_tuples(grid, region)
    import itertools
    window = list(itertools.product(*(range(n) for n in grid.window_shape)))

    v2 = 0.0
    l2 = 0.0
    for x in inside:
        ux = u.values[x]
        l2 += ux ** 2
        pt = _node_point(grid, x)
        for k in range(grid.d):
            n = grid.window_shape[k]
            a = aniso.alpha[k]
            for j in range(1, n):
                w = brute_weight(a, grid.h[k], j, n - 1)
                for sgn in (1, -1):
                    yk = x[k] + sgn * j
                    if 0 <= yk < n:
                        y = x[:k] + (yk,) + x[k + 1:]
                        v2 += w * (u.values[y] - ux) ** 2
            for side in (-1, 1):
                T = _tail_T(grid, x, k, side)
                v2 += (_fiber(u.exterior, a, pt, k, side, T, 2)
                       - 2.0 * ux * _fiber(u.exterior, a, pt, k, side, T, 1)
                       + ux ** 2 * _tail_mass(a, T))
    vol = grid.cell_volume
    if region is not None:
        outside = [x for x in window if x not in inside]
        if any(u.values[x] != 0.0 for x in outside):
            raise SupportViolation("function must vanish outside the region")
    h2 = vol * l2 + brute_energy(kernel, None, u, u)
    return vol * v2, h2
