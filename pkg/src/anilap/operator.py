"""Discrete nonlocal operator: quadrature weights, fast apply, Fourier symbol.

The one-dimensional building block is a cell quadrature for the axis density
``alpha*(2-alpha) * t**(-1-alpha)``.  For offset j >= 1 the weight is the
exact density mass of the cell ((j-1/2)h, (j+1/2)h); the singular cell
(0, h/2) cannot hold a node, so its exact second-moment mass is folded into
the j=1 weight as a curvature correction (second differences at spacing h
estimate the same local curvature the singular cell integrates).

One-sided weights applied to the symmetrized second difference
u(x+jh) + u(x-jh) - 2u(x) reproduce the full two-sided principal-value
integral; no extra factor of 1/2 appears anywhere.
"""

import math

import numpy as np
from scipy import integrate, signal
from scipy.special import gamma

from .errors import (
    BoundaryStencilError,
    OrderFitUnreliable,
    QuadratureResolutionError,
    SpectralPathUnavailable,
)
from .geometry import Anisotropy
from .grids import (CallableData, ExteriorData, GridFunction, TensorGrid,
                    Zero, as_exterior)
from .kernels import AxesKernel, ModulatedAxesKernel

__all__ = [
    "symbol_constant",
    "symbol_constant_quadrature",
    "symbol",
    "multiplier",
    "OperatorStencil",
    "apply_operator",
    "spectral_apply",
    "consistency_order",
    "cos_wave_data",
    "cos_apply_study",
    "Undefined",
]


# --- Fourier side -----------------------------------------------------------

def symbol_constant(alpha):
    """Positive constant C with 2*int_0^inf (1-cos t) a(2-a) t^(-1-a) dt = C.

    Closed form: pi * Gamma(3-alpha) * sinc((1-alpha)/2), sinc normalized.
    At alpha=1 this is exactly pi; limits 4 and 2 at the endpoints.
    """
    alpha = np.asarray(alpha, dtype=float)
    return np.pi * gamma(3.0 - alpha) * np.sinc((1.0 - alpha) / 2.0)


def symbol_constant_quadrature(alpha):
    """Slow quadrature evaluation of the same constant; audit path."""
    a = float(alpha)

    def dens(t):
        return a * (2.0 - a) * t ** (-1.0 - a)

    # near order 2 the integrand has a steep endpoint singularity; quad's
    # estimate is still good to ~1e-8, so keep it and drop the advisory
    body = integrate.quad(lambda t: 2.0 * (1.0 - math.cos(t)) * dens(t), 0.0, 1.0,
                          limit=200, full_output=1)[0]
    tail_one = 2.0 * (2.0 - a)  # 2*int_1^inf dens
    tail_cos = 2.0 * integrate.quad(dens, 1.0, np.inf, weight="cos", wvar=1.0)[0]
    return body + tail_one - tail_cos


def symbol(aniso, xi):
    """m(xi) = sum_k C(alpha_k) |xi_k|**alpha_k; the operator's Fourier symbol."""
    xi = np.asarray(xi, dtype=float)
    alpha = np.asarray(aniso.alpha)
    return np.sum(symbol_constant(alpha) * np.abs(xi) ** alpha, axis=-1)


def multiplier(aniso, xi):
    """Unnormalized anisotropic multiplier sum_k |xi_k|**alpha_k."""
    xi = np.asarray(xi, dtype=float)
    alpha = np.asarray(aniso.alpha)
    return np.sum(np.abs(xi) ** alpha, axis=-1)


# --- quadrature stencil -----------------------------------------------------

def axis_weights(kernel, k, h, count, corrected=True):
    """Folded one-sided cell weights w~_j, j = 1..count, for axis k.

    ``corrected`` redistributes each cell's exact centroid offset onto the
    neighboring offsets (a discrete gradient fix); it cancels the leading
    midpoint asymmetry error while keeping all weights positive.
    """
    if count < 1:
        raise QuadratureResolutionError(f"axis {k}: no quadrature cells fit")
    j = np.arange(1, count + 1, dtype=float)
    lo, hi = (j - 0.5) * h, (j + 0.5) * h
    w = np.asarray(kernel.axis_cell_integral(k, lo, hi), dtype=float)
    fold = kernel.axis_singular_moment(k, h / 2.0) / h ** 2
    if corrected:
        mu = np.asarray(kernel.axis_cell_first_moment(k, lo, hi), dtype=float)
        delta = mu - j * h * w  # signed centroid offset times cell mass
        dpad = np.concatenate([[0.0], delta, [0.0]])
        wc = w + (dpad[:-2] - dpad[2:]) / (2.0 * h)
        wc[0] += fold
        if np.all(wc > 0.0):
            return wc
        # near order 2 the redistribution exceeds the cell mass at every h;
        # fall through to the plain midpoint rule, which stays positive
    w[0] += fold
    if np.any(w <= 0.0):
        raise QuadratureResolutionError(
            f"axis {k}: quadrature weights lost positivity at h={h}")
    return w


class Undefined(ExteriorData):
    """Marker exterior: nothing is known beyond the window (truncated operator)."""

    label = "undefined"

    def __call__(self, pts):
        raise BoundaryStencilError("exterior values are undefined")


class OperatorStencil:
    """Per-grid cached weights, convolution kernels and tail masses."""

    def __init__(self, grid: TensorGrid, kernel):
        if not isinstance(kernel, AxesKernel) or isinstance(kernel, ModulatedAxesKernel):
            raise TypeError("fast stencil requires an unmodulated axis kernel")
        if any(n < 3 for n in grid.window_shape):
            raise QuadratureResolutionError("window needs at least 3 nodes per axis")
        self.grid = grid
        self.kernel = kernel
        self.weights = []
        self.cumw = []
        self.conv_kernels = []
        self.tail_T = []   # per axis: (T_left[i], T_right[i]) node arrays
        self.tail_mass = []
        self.window_sum = []
        for k in range(grid.d):
            n = grid.window_shape[k]
            h = grid.h[k]
            w = axis_weights(kernel, k, h, n - 1)
            cw = np.concatenate([[0.0], np.cumsum(w)])
            idx = np.arange(n)
            t_left = (idx + 0.5) * h
            t_right = (n - 1 - idx + 0.5) * h
            tm = (np.asarray(kernel.axis_tail_integral(k, t_left))
                  + np.asarray(kernel.axis_tail_integral(k, t_right)))
            ws = cw[idx] + cw[n - 1 - idx]
            kk = np.concatenate([w[::-1], [0.0], w])
            self.weights.append(w)
            self.cumw.append(cw)
            self.conv_kernels.append(kk)
            self.tail_T.append((t_left, t_right))
            self.tail_mass.append(tm)
            self.window_sum.append(ws)

    def _axis_field(self, k, vec):
        shape = [1] * self.grid.d
        shape[k] = -1
        return vec.reshape(shape)

    def neighbor_sum(self, values, axes=None):
        """sum_k sum_j w~_j (v(x+jh e_k) + v(x-jh e_k)), zero beyond the window."""
        out = np.zeros_like(values, dtype=float)
        for k in (range(self.grid.d) if axes is None else axes):
            kk = self._axis_field(k, self.conv_kernels[k])
            out += signal.fftconvolve(values, kk, mode="same")
        return out

    def measure_field(self, truncated=False):
        """Total kernel mass seen from each window node (in-window + far tail)."""
        out = np.zeros(self.grid.window_shape, dtype=float)
        for k in range(self.grid.d):
            ws = self.window_sum[k]
            if not truncated:
                ws = ws + self.tail_mass[k]
            out = out + self._axis_field(k, ws)
        return out

    def policy_tails(self, exterior, power=1):
        """sum over axes/sides of int_{beyond window} g(x+t e_k)^power dmu_k."""
        exterior = as_exterior(exterior) if not isinstance(exterior, Undefined) else exterior
        if isinstance(exterior, (Zero, Undefined)):
            return np.zeros(self.grid.window_shape, dtype=float)
        mesh = self.grid.mesh().reshape(-1, self.grid.d)
        out = np.zeros(mesh.shape[0], dtype=float)
        for k in range(self.grid.d):
            t_left, t_right = self.tail_T[k]
            for side, tvec in ((-1, t_left), (+1, t_right)):
                T = np.broadcast_to(self._axis_field(k, tvec),
                                    self.grid.window_shape).reshape(-1)
                out += _fiber_tail_grid(exterior, self.kernel, mesh, k, side, T, power)
        return out.reshape(self.grid.window_shape)


def _fiber_tail_grid(exterior, kernel, X, k, side, T, power):
    """Vectorized exterior fiber integrals; falls back to a per-node loop."""
    from .grids import BoxData, Constant, ExteriorSum

    if isinstance(exterior, Constant):
        return exterior.c ** power * np.asarray(kernel.axis_tail_integral(k, T))
    if isinstance(exterior, ExteriorSum):
        return sum(_fiber_tail_grid(item, kernel, X, k, side, T, power)
                   for item in exterior.items)
    if isinstance(exterior, BoxData):
        mask = np.ones(X.shape[0], dtype=bool)
        for j, (lo, hi) in enumerate(exterior.bounds):
            if j != k:
                mask &= (X[:, j] > lo) & (X[:, j] < hi)
        lo, hi = exterior.bounds[k]
        if side > 0:
            a, b = lo - X[:, k], hi - X[:, k]
        else:
            a, b = X[:, k] - hi, X[:, k] - lo
        a = np.maximum(a, T)
        good = mask & (b > a)
        out = np.zeros(X.shape[0], dtype=float)
        if np.any(good):
            bb = np.where(np.isfinite(b[good]), b[good], np.inf)
            out[good] = exterior.height ** power * np.asarray(
                kernel.axis_cell_integral(k, a[good], bb))
        return out
    return np.array([exterior.fiber_tail(kernel, X[i], k, side, float(T[i]), power)
                     for i in range(X.shape[0])])


def apply_operator(u: GridFunction, kernel, out="interior", stencil=None):
    """Pointwise quadrature operator on interior (or window) nodes.

    With an ``Undefined`` exterior the operator is window-truncated and every
    requested node must have both j=1 neighbors stored, else
    BoundaryStencilError.
    """
    if stencil is None:
        stencil = OperatorStencil(u.grid, kernel)
    truncated = isinstance(u.exterior, Undefined)
    if truncated:
        margins = [(s.start, n - s.stop)
                   for s, n in zip(u.grid.int_slices, u.grid.window_shape)]
        if out == "interior" and any(m0 < 1 or m1 < 1 for m0, m1 in margins):
            raise BoundaryStencilError(
                "truncated apply needs one stored exterior ring around the interior")
        if out != "interior":
            raise BoundaryStencilError(
                "truncated apply is only defined on interior nodes")
    nb = stencil.neighbor_sum(u.values)
    D = stencil.measure_field(truncated=truncated)
    res = nb - D * u.values
    if not truncated:
        res = res + stencil.policy_tails(u.exterior)
    return u.grid.interior_view(res) if out == "interior" else res


def spectral_apply(u: GridFunction, kernel_or_aniso):
    """Exact-symbol apply on a periodic grid via FFT; the audit path."""
    grid = u.grid
    if not grid.periodic:
        raise SpectralPathUnavailable("spectral apply needs a periodic grid")
    aniso = kernel_or_aniso.aniso if hasattr(kernel_or_aniso, "aniso") else kernel_or_aniso
    if isinstance(kernel_or_aniso, ModulatedAxesKernel):
        raise SpectralPathUnavailable("spectral apply needs a translation-invariant kernel")
    if not isinstance(aniso, Anisotropy):
        raise SpectralPathUnavailable("no anisotropy information for the symbol")
    freqs = [2.0 * np.pi * np.fft.fftfreq(n, d=h)
             for n, h in zip(grid.window_shape, grid.h)]
    m = np.zeros(grid.window_shape, dtype=float)
    for k, f in enumerate(freqs):
        shape = [1] * grid.d
        shape[k] = -1
        m = m + symbol_constant(aniso.alpha[k]) * np.abs(f.reshape(shape)) ** aniso.alpha[k]
    return np.real(np.fft.ifftn(-m * np.fft.fftn(u.values)))


# --- consistency study ------------------------------------------------------

def consistency_order(hs, errors):
    """Least-squares slope of log(error) vs log(h).

    Raises OrderFitUnreliable when the error curve is non-monotone in h or
    any error is non-positive.
    """
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    order = np.argsort(hs)
    hs, errors = hs[order], errors[order]
    if np.any(errors <= 0.0):
        raise OrderFitUnreliable("non-positive errors in refinement study")
    if np.any(np.diff(errors) < 0.0):
        raise OrderFitUnreliable("error curve is non-monotone under refinement")
    if len(hs) < 2:
        raise OrderFitUnreliable("need at least two refinement levels")
    A = np.vstack([np.log(hs), np.ones_like(hs)]).T
    coef, res, *_ = np.linalg.lstsq(A, np.log(errors), rcond=None)
    fitted = A @ coef
    ss_res = float(np.sum((np.log(errors) - fitted) ** 2))
    ss_tot = float(np.sum((np.log(errors) - np.log(errors).mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"order": float(coef[0]), "intercept": float(coef[1]), "r2": r2}


def cos_wave_data(alpha, xi):
    """cos(xi*x) on the line with exact oscillatory fiber tails (d=1)."""
    a, xi = float(alpha), float(xi)

    cache = {}

    def moments(T):
        key = round(T, 15)
        if key not in cache:
            dens = lambda t: a * (2.0 - a) * t ** (-1.0 - a)
            ic = integrate.quad(dens, T, np.inf, weight="cos", wvar=xi)[0]
            isn = integrate.quad(dens, T, np.inf, weight="sin", wvar=xi)[0]
            cache[key] = (ic, isn)
        return cache[key]

    def tail_fn(kernel, x, k, side, T, power=1):
        if power != 1:
            raise NotImplementedError("only first moments are exact here")
        ic, isn = moments(T)
        x0 = float(np.asarray(x).ravel()[0])
        # cos(xi*(x + side*t)) = cos(xi x)cos(xi t) - side*sin(xi x)sin(xi t)
        return math.cos(xi * x0) * ic - side * math.sin(xi * x0) * isn

    return CallableData(lambda p: np.cos(xi * np.asarray(p)[..., 0]), tail_fn=tail_fn)


def cos_apply_study(alpha, xi=1.0, sizes=(64, 128, 256, 512), half_width=np.pi,
                    pad_cells=32):
    """Refinement study of the quadrature apply against the exact symbol (d=1).

    Returns spacings, sup-norm errors over the interior, and the fitted order.
    """
    aniso = Anisotropy((float(alpha),))
    from .geometry import rect

    # in d=1 the rectangle half-width equals the radius itself
    region = rect(aniso, (0.0,), half_width)
    data = cos_wave_data(alpha, xi)
    hs, errs = [], []
    for n in sizes:
        grid = TensorGrid.for_rect(aniso, region, n, pad_cells=pad_cells)
        u = GridFunction(grid, data(grid.mesh()), exterior=data)
        lhs = apply_operator(u, AxesKernel(aniso))
        x = grid.axes[0][grid.int_slices[0]]
        ref = -float(symbol(aniso, np.array([xi]))) * np.cos(xi * x)
        hs.append(grid.h[0])
        errs.append(float(np.max(np.abs(lhs - ref))))
    fit = consistency_order(hs, errs)
    return {"h": hs, "error": errs, **fit}
