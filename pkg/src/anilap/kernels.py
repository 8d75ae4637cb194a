"""Jump kernels: axis-aligned singular measures and their comparable variants.

Three families share one interface:

* ``AxesKernel`` — the reference family.  Jumps move one coordinate at a
  time; along axis k the jump length has density
  ``alpha_k*(2-alpha_k) * |t|**(-1-alpha_k)``.
* ``IsotropicKernel`` — a d-dimensional density ``a(x,y) |x-y|**(-d-alpha)``
  with a measurable coefficient ``a`` taking values in [1, 2].
* ``ModulatedAxesKernel`` — the axis family modulated by such a coefficient.

The normalizing factor alpha*(2-alpha) keeps the small-jump second moment
bounded uniformly as alpha approaches 0 or 2: the truncated moment
``int (|t|^2 ^ 1) dens dt`` equals exactly 4 per axis, hence 4*d for the
full axis family.
"""

import numpy as np
from scipy import integrate

from .errors import IntegrabilityFailure, InvalidQuery, SingularPoint

__all__ = [
    "AxesKernel",
    "ModulatedAxesKernel",
    "IsotropicKernel",
    "coeff_constant",
    "coeff_checkerboard",
    "coeff_bump",
    "coeff_onesided",
    "check_levy_integrability",
    "check_symmetry",
    "comparability_estimate",
    "tail_mass",
]


# --- coefficient catalog ----------------------------------------------------

def coeff_constant(c=1.0):
    """a(x, y) = c.  Symmetric; admissible for c in [1, 2]."""
    def a(x, y):
        return np.full(np.broadcast_shapes(np.shape(x), np.shape(y))[:-1], float(c))
    a.symmetric = True
    a.label = f"constant({c})"
    return a


def coeff_checkerboard(scale=1.0):
    """Symmetric coefficient oscillating between 1 and 2 on cells of given scale.

    Depends on the midpoint of the pair, so symmetry is exact by construction.
    """
    def a(x, y):
        m = (np.asarray(x, float) + np.asarray(y, float)) / 2.0
        phase = np.sum(np.floor(m / scale), axis=-1)
        return 1.5 + 0.5 * np.where(phase % 2 == 0, 1.0, -1.0)
    a.symmetric = True
    a.label = f"checkerboard({scale})"
    return a


def coeff_bump(width=1.0):
    """Smooth symmetric coefficient 1 + exp(-|x-y|^2/width^2), values in (1, 2]."""
    def a(x, y):
        d2 = np.sum((np.asarray(x, float) - np.asarray(y, float)) ** 2, axis=-1)
        return 1.0 + np.exp(-d2 / width ** 2)
    a.symmetric = True
    a.label = f"bump({width})"
    return a


def coeff_onesided():
    """Deliberately asymmetric coefficient 1 + 1{x_1 < y_1}; fails symmetry checks."""
    def a(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return 1.0 + (x[..., 0] < y[..., 0]).astype(float)
    a.symmetric = False
    a.label = "onesided"
    return a


# --- kernel families --------------------------------------------------------

class AxesKernel:
    """Axis-aligned jump kernel; the reference family for all comparisons."""

    variant = "axes"

    def __init__(self, aniso):
        self.aniso = aniso
        self.coeff = None

    @property
    def d(self):
        return self.aniso.d

    def axis_density(self, k, t):
        """1-d jump density along axis k at offset t (vectorized)."""
        t = np.asarray(t, dtype=float)
        if np.any(t == 0.0):
            raise SingularPoint("axis density diverges at zero offset")
        a = self.aniso.alpha[k]
        return a * (2.0 - a) * np.abs(t) ** (-1.0 - a)

    def axis_cell_integral(self, k, lo, hi):
        """Exact integral of the axis-k density over [lo, hi], 0 < lo < hi."""
        a = self.aniso.alpha[k]
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        return (2.0 - a) * (lo ** (-a) - hi ** (-a))

    def axis_tail_integral(self, k, T):
        """Exact integral of the axis-k density over [T, inf)."""
        a = self.aniso.alpha[k]
        return (2.0 - a) * np.asarray(T, dtype=float) ** (-a)

    def axis_cell_first_moment(self, k, lo, hi):
        """Exact integral of t * density over [lo, hi], 0 < lo < hi."""
        a = self.aniso.alpha[k]
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if abs(a - 1.0) < 1e-14:
            return a * (2.0 - a) * np.log(hi / lo)
        return a * (2.0 - a) * (hi ** (1.0 - a) - lo ** (1.0 - a)) / (1.0 - a)

    def axis_singular_moment(self, k, s):
        """Exact integral of t^2 * density over (0, s]; the curvature weight."""
        a = self.aniso.alpha[k]
        return a * float(s) ** (2.0 - a)

    def density_eval(self, x, y):
        """Density relative to the 1-d Lebesgue factor along the axis joining x, y.

        x and y must differ in exactly one coordinate; off-axis pairs carry no
        mass and return 0.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        diff = y - x
        nz = np.flatnonzero(diff)
        if nz.size == 0:
            raise SingularPoint("density requested on the diagonal x == y")
        if nz.size > 1:
            return 0.0
        k = int(nz[0])
        base = float(self.axis_density(k, diff[k]))
        if self.coeff is not None:
            base *= float(self.coeff(x, y))
        return base

    def modulation(self, x, y):
        return None  # no pairwise coefficient


class ModulatedAxesKernel(AxesKernel):
    """Axis kernel times a pairwise coefficient a(x, y) in [1, 2]."""

    variant = "modulated_axes"

    def __init__(self, aniso, coeff, symmetric=None):
        super().__init__(aniso)
        self.coeff = coeff
        self.symmetric = getattr(coeff, "symmetric", symmetric)

    def modulation(self, x, y):
        return self.coeff(x, y)


class IsotropicKernel:
    """Full d-dimensional density a(x, y) |x-y|**(-d-alpha), a in [1, 2]."""

    variant = "isotropic"

    def __init__(self, d, alpha, coeff=None, symmetric=None):
        if not (0.0 < alpha < 2.0):
            raise ValueError("alpha must lie in (0, 2)")
        self.d = int(d)
        self.alpha = float(alpha)
        self.coeff = coeff if coeff is not None else coeff_constant(1.0)
        self.symmetric = getattr(self.coeff, "symmetric", symmetric)

    def density_eval(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.linalg.norm(y - x, axis=-1)
        if np.any(r == 0.0):
            raise SingularPoint("density requested on the diagonal x == y")
        return self.coeff(x, y) * r ** (-self.d - self.alpha)


# --- diagnostics ------------------------------------------------------------

def _unit_directions(d, n, rng):
    """Quasi-uniform direction set: lattice on the circle, seeded sphere in d>2."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        th = (np.arange(n) + 0.5) * (2.0 * np.pi / n)
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _tail_panels(f, start=1.0, rtol=1e-12, max_panels=600):
    """Integrate f over [start, inf) by doubling panels.

    Keeps coefficient discontinuities finite per panel; far panels may
    still span many oscillation cells, so the advisory output of quad is
    swallowed and only the estimate used (truncation is controlled by the
    panel sum, not quad's internal tolerance)."""
    total = 0.0
    lo = float(start)
    for _ in range(max_panels):
        hi = 2.0 * lo
        part = integrate.quad(f, lo, hi, limit=100, full_output=1)[0]
        total += part
        lo = hi
        if abs(part) <= rtol * max(abs(total), 1e-300):
            break
    return total


def check_levy_integrability(kernel, points=None, cap=1e6, seed=0):
    """Evaluate sup_x int (|x-y|^2 ^ 1) mu(x, dy) by direct quadrature.

    For the axis family the value is location-free and equals 4*d exactly;
    the quadrature here is deliberately independent of that closed form.

    Returns the maximum over the supplied points (one arbitrary point when
    none are given).

    Raises
    ------
    IntegrabilityFailure
        If any evaluation exceeds ``cap``.
    """
    if points is None:
        points = [np.zeros(kernel.d)]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for x in points:
        x = np.asarray(x, dtype=float)
        if isinstance(kernel, AxesKernel):
            total = 0.0
            for k in range(kernel.d):
                ak = kernel.aniso.alpha[k]
                if kernel.coeff is None:
                    amod = lambda t, k=k: 1.0
                else:
                    def amod(t, k=k, x=x):
                        y = x.copy()
                        y[k] += t
                        return float(kernel.coeff(x, y))
                dens = lambda t, ak=ak: ak * (2.0 - ak) * abs(t) ** (-1.0 - ak)
                for sign in (+1.0, -1.0):
                    body = integrate.quad(
                        lambda t: t ** 2 * dens(t) * amod(sign * t), 0.0, 1.0,
                        limit=200,
                    )[0]
                    if kernel.coeff is None:
                        tail = integrate.quad(dens, 1.0, np.inf, limit=200)[0]
                    else:
                        tail = _tail_panels(
                            lambda t: dens(t) * amod(sign * t))
                    total += body + tail
        else:
            # isotropic: angular average of the radial integral
            dirs = _unit_directions(kernel.d, 64, rng)
            total = 0.0
            for th in dirs:
                def amod(r, th=th, x=x):
                    return float(kernel.coeff(x[None, :], (x + r * th)[None, :])[0])
                dens = lambda r: r ** (kernel.d - 1) * r ** (-kernel.d - kernel.alpha)
                body = integrate.quad(lambda r: r ** 2 * dens(r) * amod(r), 0.0, 1.0,
                                      limit=200)[0]
                tail = _tail_panels(lambda r: dens(r) * amod(r))
                total += (body + tail) * _sphere_area(kernel.d) / len(dirs)
        if not np.isfinite(total) or total > cap:
            raise IntegrabilityFailure(f"truncated jump moment {total} exceeds cap {cap}")
        worst = max(worst, total)
    return worst


def _sphere_area(d):
    from scipy.special import gamma as G
    return 2.0 * np.pi ** (d / 2.0) / G(d / 2.0)


def _axes_measure_of_box(kernel, x, box_bounds):
    """mu(x, box) for an axis kernel: exact per-axis integrals.

    ``box_bounds`` is a list of (lo, hi).  Only axis-aligned fibers through x
    can carry mass: axis k contributes when all other coordinates of x lie
    inside the box's projections.
    """
    x = np.asarray(x, dtype=float)
    total = 0.0
    for k in range(kernel.d):
        others_in = all(
            box_bounds[j][0] < x[j] < box_bounds[j][1]
            for j in range(kernel.d) if j != k
        )
        if not others_in:
            continue
        lo, hi = box_bounds[k][0] - x[k], box_bounds[k][1] - x[k]
        if lo < 0.0 < hi:
            raise InvalidQuery("query point inside the target box")
        lo, hi = sorted((abs(lo), abs(hi)))
        if kernel.coeff is None:
            total += kernel.axis_cell_integral(k, lo, hi)
        else:
            sgn = 1.0 if box_bounds[k][0] - x[k] > 0 else -1.0

            def f(t, k=k, x=x, sgn=sgn):
                y = x.copy()
                y[k] += sgn * t
                return float(kernel.coeff(x, y)) * float(kernel.axis_density(k, t))

            total += integrate.quad(f, lo, hi, limit=200)[0]
    return total


def check_symmetry(kernel, rect_a, rect_b, n=12, rtol=1e-3):
    """Compare int_A mu(x, B) dx with int_B mu(x, A) dx on disjoint boxes.

    Returns (value_ab, value_ba, relative_gap).  A symmetric kernel satisfies
    gap <= rtol up to quadrature error; the one-sided coefficient violates it
    by construction.
    """
    ba, bb = rect_a.bounds(), rect_b.bounds()

    def box_nodes(bounds):
        axes = [np.linspace(lo, hi, n + 1)[:-1] + (hi - lo) / (2 * n)
                for lo, hi in bounds]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        vol = np.prod([(hi - lo) / n for lo, hi in bounds])
        return pts, vol

    pa, va = box_nodes(ba)
    pb, vb = box_nodes(bb)

    if isinstance(kernel, AxesKernel):
        iab = sum(_axes_measure_of_box(kernel, x, bb) for x in pa) * va
        iba = sum(_axes_measure_of_box(kernel, x, ba) for x in pb) * vb
    else:
        diff = pa[:, None, :] - pb[None, :, :]
        r = np.linalg.norm(diff, axis=-1)
        dens_ab = kernel.coeff(pa[:, None, :], pb[None, :, :]) * r ** (-kernel.d - kernel.alpha)
        dens_ba = kernel.coeff(pb[None, :, :], pa[:, None, :]) * r ** (-kernel.d - kernel.alpha)
        iab = dens_ab.sum() * va * vb
        iba = dens_ba.sum() * va * vb
    scale = max(abs(iab), abs(iba))
    # two boxes the kernel does not connect are trivially symmetric
    gap = abs(iab - iba) / scale if scale > 0.0 else 0.0
    return iab, iba, gap


def _trial_functions(bounds, n, seed):
    """Deterministic batch of smooth trial arrays on an n^d lattice over bounds."""
    rng = np.random.default_rng(seed)
    axes = [np.linspace(lo, hi, n) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    spans = np.array([hi - lo for lo, hi in bounds])
    mids = np.array([(hi + lo) / 2 for lo, hi in bounds])
    z = (pts - mids) / spans  # in [-1/2, 1/2]^d
    trials = []
    trials.append(np.prod(np.cos(np.pi * z), axis=-1))
    trials.append(np.exp(-8.0 * np.sum(z ** 2, axis=-1)))
    for _ in range(4):
        freq = rng.integers(1, 4, size=z.shape[-1])
        phase = rng.uniform(0, 2 * np.pi, size=z.shape[-1])
        trials.append(np.sum(np.sin(2 * np.pi * freq * z + phase), axis=-1))
    return pts, trials


def _pair_energy_axes(kernel, pts, vals, h):
    """Brute-force axis-pair energy sum on a small lattice (O(N^2) per axis)."""
    d = pts.shape[-1]
    shape = vals.shape
    total = 0.0
    vol = float(np.prod(h))
    for k in range(d):
        nk = shape[k]
        ak = kernel.aniso.alpha[k]
        for j in range(1, nk):
            lo, hi = (j - 0.5) * h[k], (j + 0.5) * h[k]
            w = (2.0 - ak) * (lo ** (-ak) - hi ** (-ak))
            if j == 1:
                w += ak * (h[k] / 2.0) ** (2.0 - ak) / h[k] ** 2
            sl_hi = [slice(None)] * d
            sl_lo = [slice(None)] * d
            sl_hi[k] = slice(j, None)
            sl_lo[k] = slice(None, nk - j)
            dv = vals[tuple(sl_hi)] - vals[tuple(sl_lo)]
            if kernel.coeff is not None:
                a = kernel.coeff(pts[tuple(sl_lo)], pts[tuple(sl_hi)])
            else:
                a = 1.0
            total += 2.0 * vol * np.sum(a * w * dv ** 2)
    return total


def comparability_estimate(kernel, region, n=8, seed=0):
    """Empirical two-sided comparison of kernel energy against the axis energy.

    Evaluates the ratio E_K(w, w) / E_axes(w, w) for a fixed trial set of
    smooth lattice functions on ``region`` and returns (lo, hi).  These are
    sampled bounds, not a proof of comparability.
    """
    from .geometry import Anisotropy

    bounds = region.bounds()
    pts, trials = _trial_functions(bounds, n, seed)
    h = np.array([(hi - lo) / (n - 1) for lo, hi in bounds])

    if isinstance(kernel, AxesKernel):
        ref = AxesKernel(kernel.aniso)
    else:
        ref = AxesKernel(Anisotropy((kernel.alpha,) * kernel.d))

    ratios = []
    for w in trials:
        e_ref = _pair_energy_axes(ref, pts, w, h)
        if isinstance(kernel, AxesKernel):
            e_ker = _pair_energy_axes(kernel, pts, w, h)
        else:
            flat = pts.reshape(-1, pts.shape[-1])
            fv = w.ravel()
            diff = flat[:, None, :] - flat[None, :, :]
            r = np.linalg.norm(diff, axis=-1)
            np.fill_diagonal(r, np.inf)
            dens = kernel.coeff(flat[:, None, :], flat[None, :, :]) * r ** (-kernel.d - kernel.alpha)
            dv = fv[:, None] - fv[None, :]
            e_ker = float(np.sum(dens * dv ** 2)) * float(np.prod(h)) ** 2
        ratios.append(e_ker / e_ref)
    return float(min(ratios)), float(max(ratios))


def tail_mass(kernel, x, region, n_dirs=256, seed=0):
    """mu(x, complement of region) for x strictly inside ``region``.

    Axis kernels integrate exactly per axis; the isotropic family uses an
    angular lattice with the exact radial antiderivative per direction.

    Raises
    ------
    InvalidQuery
        If x is not strictly inside the region.
    """
    x = np.asarray(x, dtype=float)
    if not bool(region.contains(x)):
        raise InvalidQuery("tail mass requires the base point inside the region")
    bounds = region.bounds()
    if isinstance(kernel, AxesKernel):
        total = 0.0
        for k in range(kernel.d):
            lo, hi = bounds[k]
            for dist, sgn in ((hi - x[k], +1.0), (x[k] - lo, -1.0)):
                if kernel.coeff is None:
                    total += float(kernel.axis_tail_integral(k, dist))
                else:
                    def f(t, k=k, sgn=sgn):
                        y = x.copy()
                        y[k] += sgn * t
                        return float(kernel.coeff(x, y)) * float(kernel.axis_density(k, t))
                    val, _ = integrate.quad(f, dist, np.inf, limit=200)
                    total += val
        return total
    # isotropic: distance to the box boundary along each direction
    rng = np.random.default_rng(seed)
    dirs = _unit_directions(kernel.d, n_dirs, rng)
    area = _sphere_area(kernel.d)
    total = 0.0
    for th in dirs:
        ts = []
        for k in range(kernel.d):
            if th[k] > 0:
                ts.append((bounds[k][1] - x[k]) / th[k])
            elif th[k] < 0:
                ts.append((bounds[k][0] - x[k]) / th[k])
        t_exit = min(ts)

        def f(r, th=th):
            return float(kernel.coeff(x[None, :], (x + r * th)[None, :])[0]) * r ** (-1.0 - kernel.alpha)

        val, _ = integrate.quad(f, t_exit, np.inf, limit=200)
        total += val * area / len(dirs)
    return total
