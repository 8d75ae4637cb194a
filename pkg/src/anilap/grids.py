"""Tensor-product grids, grid functions, and exterior data with exact far tails.

A grid represents an open anisotropic rectangle (the *interior*) plus a
surrounding window of explicitly stored exterior nodes, all on one uniform
per-axis lattice.  Nodes are cell-centered: with n nodes per axis across a
half-width hw, the spacing is h = 2*hw/n and the outermost node sits half a
cell inside the boundary, so cell volumes tile the rectangle exactly.

Everything beyond the window is described by an :class:`ExteriorData` object
that can report exact fiber integrals of itself against the axis kernels;
that is what keeps far-away boundary data cheap and quadrature-free.
"""

import math

import numpy as np
from scipy import integrate

from .errors import InvalidQuery, SupportViolation
from .geometry import AnisoRect

__all__ = [
    "TensorGrid",
    "GridFunction",
    "ExteriorData",
    "Zero",
    "BoxData",
    "CallableData",
    "ExteriorSum",
    "constant_data",
    "axis_bump",
    "half_line",
]


class TensorGrid:
    """Uniform tensor lattice over an interior rectangle plus exterior padding."""

    def __init__(self, aniso, interior, axes, int_slices, periodic=False):
        self.aniso = aniso
        self.interior = interior
        self.axes = tuple(np.asarray(a, dtype=float) for a in axes)
        self.int_slices = tuple(int_slices)
        self.periodic = bool(periodic)
        self.h = tuple(float(a[1] - a[0]) if len(a) > 1 else 0.0 for a in self.axes)

    # -- construction --------------------------------------------------------

    @classmethod
    def for_rect(cls, aniso, interior, n, pad_cells=16, pad=None):
        """Grid whose interior nodes tile ``interior`` with n (odd) nodes per axis.

        ``pad`` gives the represented exterior extent per axis in coordinate
        units (scalar or per-axis); ``pad_cells`` is used when ``pad`` is None.
        """
        d = aniso.d
        if np.isscalar(n):
            n = tuple(int(n) for _ in range(d))
        n = tuple(int(v) | 1 for v in n)  # force odd so a node sits at the center
        if pad is not None and np.isscalar(pad):
            pad = tuple(float(pad) for _ in range(d))
        axes = []
        slices = []
        for k in range(d):
            hw = interior.half_widths[k]
            c = interior.center[k]
            h = 2.0 * hw / n[k]
            m = (n[k] - 1) // 2
            if pad is None:
                ext = int(pad_cells)
            else:
                ext = int(math.ceil(pad[k] / h))
            idx = np.arange(-m - ext, m + ext + 1)
            axes.append(c + idx * h)
            slices.append(slice(ext, ext + n[k]))
        return cls(aniso, interior, axes, slices)

    @classmethod
    def periodic_cell(cls, aniso, bounds, n):
        """Periodic grid over the box ``bounds``; no exterior, FFT-friendly."""
        axes = []
        slices = []
        for k, (lo, hi) in enumerate(bounds):
            nk = int(n if np.isscalar(n) else n[k])
            h = (hi - lo) / nk
            axes.append(lo + (np.arange(nk) + 0.5) * h)
            slices.append(slice(0, nk))
        center = tuple((lo + hi) / 2.0 for lo, hi in bounds)
        # interior record is only used for bookkeeping on periodic grids
        interior = AnisoRect(aniso, center, 1.0)
        return cls(aniso, interior, axes, slices, periodic=True)

    # -- basic queries ---------------------------------------------------------

    @property
    def d(self):
        return len(self.axes)

    @property
    def window_shape(self):
        return tuple(len(a) for a in self.axes)

    @property
    def interior_shape(self):
        return tuple(s.stop - s.start for s in self.int_slices)

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    def interior_view(self, arr):
        return arr[self.int_slices]

    def interior_mask(self):
        m = np.zeros(self.window_shape, dtype=bool)
        m[self.int_slices] = True
        return m

    def window_bounds(self):
        return tuple(
            (a[0] - hk / 2.0, a[-1] + hk / 2.0) for a, hk in zip(self.axes, self.h)
        )

    def mesh(self, slices=None):
        """Stacked coordinates, shape (*, d); full window when slices is None."""
        axes = self.axes if slices is None else [a[s] for a, s in zip(self.axes, slices)]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack(grids, axis=-1)

    def slices_for(self, rect):
        """Per-axis slices of window indices whose nodes lie strictly inside rect."""
        out = []
        for a, (lo, hi) in zip(self.axes, rect.bounds()):
            i0 = int(np.searchsorted(a, lo, side="right"))
            i1 = int(np.searchsorted(a, hi, side="left"))
            out.append(slice(i0, max(i0, i1)))
        return tuple(out)

    def embed(self, rect_values, slices):
        out = np.zeros(self.window_shape, dtype=float)
        out[slices] = rect_values
        return out


class GridFunction:
    """Values on a grid window plus a description of the function beyond it."""

    def __init__(self, grid, values, exterior="zero"):
        values = np.asarray(values, dtype=float)
        if values.shape != grid.window_shape:
            raise ValueError(
                f"values shape {values.shape} != window {grid.window_shape}"
            )
        self.grid = grid
        self.values = values
        self.exterior = as_exterior(exterior)

    @classmethod
    def from_callable(cls, grid, fn, exterior=None):
        vals = np.apply_along_axis(lambda x: fn(x), -1, grid.mesh()) \
            if not _vectorized(fn) else fn(grid.mesh())
        if exterior is None:
            exterior = CallableData(fn)
        return cls(grid, np.asarray(vals, dtype=float), exterior)

    @property
    def interior_values(self):
        return self.grid.interior_view(self.values)

    def copy(self):
        return GridFunction(self.grid, self.values.copy(), self.exterior)


def _vectorized(fn):
    try:
        out = fn(np.zeros((2, 3, 1)))
    except Exception:
        return False
    return np.shape(out) == (2, 3)


# --- exterior data ----------------------------------------------------------

class ExteriorData:
    """Function on the complement of the grid window (and of the interior).

    Subclasses provide exact axis-fiber integrals against the jump kernels so
    the solver and the norms can account for everything beyond the stored
    window in closed form.
    """

    label = "exterior"

    def __call__(self, pts):
        raise NotImplementedError

    def fiber_tail(self, kernel, x, k, side, T, power=1):
        """integral_T^inf g(x + side*t*e_k)**power * dens_k(t) dt, exact."""
        raise NotImplementedError

    def range(self):
        """(inf g, sup g) over all space; used by maximum-principle checks."""
        raise NotImplementedError


class Zero(ExteriorData):
    label = "zero"

    def __call__(self, pts):
        return np.zeros(np.shape(pts)[:-1])

    def fiber_tail(self, kernel, x, k, side, T, power=1):
        return 0.0

    def range(self):
        return (0.0, 0.0)


class BoxData(ExteriorData):
    """height * indicator of an axis-aligned box; bounds may be infinite.

    Covers the whole catalog of closed-form exterior data: a constant is the
    all-space box, a half-line indicator is a box unbounded on one side, and
    an axis bump is a finite box around an axis.
    """

    def __init__(self, bounds, height=1.0, label=None):
        self.bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
        self.height = float(height)
        if label:
            self.label = label

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        inside = np.ones(pts.shape[:-1], dtype=bool)
        for k, (lo, hi) in enumerate(self.bounds):
            inside &= (pts[..., k] > lo) & (pts[..., k] < hi)
        return self.height * inside.astype(float)

    def fiber_tail(self, kernel, x, k, side, T, power=1):
        x = np.asarray(x, dtype=float)
        for j, (lo, hi) in enumerate(self.bounds):
            if j != k and not (lo < x[j] < hi):
                return 0.0
        lo, hi = self.bounds[k]
        if side > 0:
            a, b = lo - x[k], hi - x[k]
        else:
            a, b = x[k] - hi, x[k] - lo
        a = max(a, T)
        if not (b > a):
            return 0.0
        mass = (kernel.axis_tail_integral(k, a) if not np.isfinite(b)
                else kernel.axis_cell_integral(k, a, b))
        return self.height ** power * float(mass)

    def range(self):
        return (min(0.0, self.height), max(0.0, self.height)) \
            if any(np.isfinite(v) for b in self.bounds for v in b) \
            else (self.height, self.height)


class ExteriorSum(ExteriorData):
    """Sum of catalog items; fiber integrals assume pairwise-disjoint supports."""

    label = "sum"

    def __init__(self, items):
        self.items = [as_exterior(i) for i in items]

    def __call__(self, pts):
        return sum(item(pts) for item in self.items)

    def fiber_tail(self, kernel, x, k, side, T, power=1):
        return sum(item.fiber_tail(kernel, x, k, side, T, power) for item in self.items)

    def range(self):
        los, his = zip(*(item.range() for item in self.items))
        # disjoint supports: the sum attains each item's extreme plus 0 elsewhere
        return (min(0.0, *los), max(0.0, *his))


class CallableData(ExteriorData):
    """Arbitrary callable exterior; fiber integrals by panel quadrature.

    ``tail_fn(kernel, x, k, side, T, power)`` may be supplied for exact tails.
    """

    label = "callable"

    def __init__(self, fn, tail_fn=None, cap=1e7):
        self.fn = fn
        self.tail_fn = tail_fn
        self.cap = float(cap)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        if _vectorized(self.fn):
            return np.asarray(self.fn(pts), dtype=float)
        return np.apply_along_axis(lambda x: self.fn(x), -1, pts)

    def fiber_tail(self, kernel, x, k, side, T, power=1):
        if self.tail_fn is not None:
            return self.tail_fn(kernel, x, k, side, T, power)
        x = np.asarray(x, dtype=float)

        def f(t):
            y = np.array(x, copy=True)
            y[k] = x[k] + side * t
            g = self.fn(y[None, :]) if _vectorized(self.fn) else self.fn(y)
            return float(np.asarray(g).ravel()[0]) ** power * float(kernel.axis_density(k, t))

        total, t0 = 0.0, T
        while t0 < self.cap:
            t1 = min(2.0 * t0, self.cap)
            total += integrate.quad(f, t0, t1, limit=100)[0]
            t0 = t1
        return total

    def range(self):
        raise InvalidQuery("callable exterior has no declared range")


def as_exterior(obj):
    if obj is None or (isinstance(obj, str) and obj == "zero"):
        return Zero()
    if isinstance(obj, ExteriorData):
        return obj
    if isinstance(obj, tuple) and len(obj) == 2 and obj[0] == "constant":
        return constant_data(obj[1])
    if callable(obj):
        return CallableData(obj)
    raise TypeError(f"cannot interpret exterior spec {obj!r}")


class Constant(ExteriorData):
    def __init__(self, c):
        self.c = float(c)
        self.label = f"constant({c})"

    def __call__(self, pts):
        return np.full(np.shape(pts)[:-1], self.c)

    def fiber_tail(self, kernel, x, k, side, T, power=1):
        return self.c ** power * float(kernel.axis_tail_integral(k, T))

    def range(self):
        return (self.c, self.c)


def constant_data(c):
    return Constant(c)


def axis_bump(d, axis, start, length, height=1.0, thickness=None, center=None):
    """Box bump sitting on a coordinate axis at prescribed offset.

    The box spans [start, start+length] along ``axis``; across the other axes
    it extends ``thickness`` (full width) around ``center`` (default origin).
    """
    if center is None:
        center = np.zeros(d)
    bounds = []
    for k in range(d):
        if k == axis:
            bounds.append((start, start + length))
        elif thickness is None:
            bounds.append((-np.inf, np.inf))
        else:
            bounds.append((center[k] - thickness / 2.0, center[k] + thickness / 2.0))
    return BoxData(bounds, height=height,
                   label=f"axis_bump(axis={axis}, start={start})")


def half_line(d, axis, threshold, direction=+1, height=1.0):
    """height * indicator of {x: direction*(x_axis - threshold) > 0}."""
    bounds = []
    for k in range(d):
        if k == axis:
            bounds.append((threshold, np.inf) if direction > 0 else (-np.inf, threshold))
        else:
            bounds.append((-np.inf, np.inf))
    return BoxData(bounds, height=height,
                   label=f"half_line(axis={axis}, thr={threshold})")


def require_supported_inside(u, region):
    """Raise SupportViolation unless u vanishes outside ``region`` (incl. beyond window)."""
    if not isinstance(u.exterior, Zero):
        rng = u.exterior.range()
        if rng != (0.0, 0.0):
            raise SupportViolation("nonzero exterior data outside the region")
    mask = np.zeros(u.grid.window_shape, dtype=bool)
    mask[u.grid.slices_for(region)] = True
    if np.any(u.values[~mask] != 0.0):
        raise SupportViolation("grid values nonzero outside the region")
