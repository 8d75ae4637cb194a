"""Anisotropic geometry: direction-dependent scale, rectangles, metric, coverings.

Each coordinate axis k carries its own differentiability order ``alpha_k`` in
(0, 2).  The natural geometry is then anisotropic: a ball of radius r is an
axis-aligned rectangle whose half-width along axis k is ``r**(alpha_max/alpha_k)``,
and the matching metric compares coordinate offsets through the exponents
``alpha_k/alpha_max``, saturating at 1 for offsets larger than 1.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRadius, SobolevExponentUndefined

__all__ = [
    "Anisotropy",
    "AnisoRect",
    "ScaleMap",
    "beta_theta",
    "metric_dist",
    "rect",
    "scale_map",
    "cover",
]


@dataclass(frozen=True)
class Anisotropy:
    """Tuple of per-axis integrability orders, all in the open interval (0, 2)."""

    alpha: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.alpha)
        if len(a) == 0:
            raise ValueError("need at least one axis")
        if any(not (0.0 < v < 2.0) for v in a):
            raise ValueError(f"orders must lie in (0, 2), got {a}")
        object.__setattr__(self, "alpha", a)

    @property
    def d(self):
        return len(self.alpha)

    @property
    def alpha_max(self):
        return max(self.alpha)

    @property
    def alpha_min(self):
        return min(self.alpha)

    @property
    def beta(self):
        """Harmonic aggregate sum_k 1/alpha_k; drives volume scaling."""
        return sum(1.0 / a for a in self.alpha)

    def exponents(self):
        """Per-axis rectangle exponents alpha_max/alpha_k (all >= 1)."""
        return tuple(self.alpha_max / a for a in self.alpha)


def beta_theta(aniso):
    """Return (beta, theta): the harmonic sum and the embedding exponent.

    theta = 2*beta/(beta - 1) requires beta > 1; for a single axis with
    alpha >= 1 the exponent does not exist.

    Raises
    ------
    SobolevExponentUndefined
        If beta <= 1.
    """
    beta = aniso.beta
    if beta <= 1.0:
        raise SobolevExponentUndefined(
            f"beta = {beta} <= 1: embedding exponent undefined"
        )
    return beta, 2.0 * beta / (beta - 1.0)


@dataclass(frozen=True)
class AnisoRect:
    """Open axis-aligned rectangle M_r(center) with per-axis half-width r**(amax/ak)."""

    aniso: Anisotropy
    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        if len(c) != self.aniso.d:
            raise ValueError("center dimension mismatch")
        object.__setattr__(self, "center", c)
        if not (self.radius > 0.0) or not math.isfinite(self.radius):
            raise InvalidRadius(f"radius must be positive and finite, got {self.radius}")

    @property
    def half_widths(self):
        r = self.radius
        return tuple(r ** e for e in self.aniso.exponents())

    @property
    def volume(self):
        """2^d * r**(alpha_max*beta)."""
        v = 1.0
        for hw in self.half_widths:
            v *= 2.0 * hw
        return v

    def contains(self, x):
        """Strict (open-set) membership. Accepts a point or an (n, d) array."""
        x = np.asarray(x, dtype=float)
        c = np.asarray(self.center)
        hw = np.asarray(self.half_widths)
        return np.all(np.abs(x - c) < hw, axis=-1)

    def scaled(self, factor):
        """Rectangle with radius multiplied by ``factor``, same center."""
        return AnisoRect(self.aniso, self.center, self.radius * factor)

    def bounds(self):
        """Per-axis (lo, hi) tuples."""
        return tuple(
            (c - hw, c + hw) for c, hw in zip(self.center, self.half_widths)
        )


def rect(aniso, center, radius):
    """Construct the open anisotropic rectangle M_radius(center)."""
    return AnisoRect(aniso, tuple(center), float(radius))


def metric_dist(aniso, x, y):
    """Anisotropy-adapted distance, clamped to [0, 1].

    Per axis the offset contributes |x_k - y_k|**(alpha_k/alpha_max) when the
    offset is at most 1 and saturates at 1 beyond; the distance is the max over
    axes.  For 0 < r <= 1 the sub-r sublevel set around x equals the open
    rectangle ``rect(aniso, x, r)``.  Broadcasts over leading dimensions.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    diff = np.abs(x - y)
    amax = aniso.alpha_max
    out = np.zeros(np.broadcast_shapes(x.shape, y.shape)[:-1], dtype=float)
    for k, ak in enumerate(aniso.alpha):
        dk = diff[..., k]
        contrib = np.where(dk <= 1.0, dk ** (ak / amax), 1.0)
        out = np.maximum(out, contrib)
    return np.minimum(out, 1.0) if out.ndim else float(min(out, 1.0))


@dataclass(frozen=True)
class ScaleMap:
    """Diagonal scaling x_k -> lam**(alpha_max/alpha_k) * x_k.

    Maps M_r(0) onto M_(lam*r)(0); its determinant is lam**(alpha_max*beta).
    Under composition with this map the axis-kernel energy picks up the factor
    lam**(alpha_max - alpha_max*beta) and process time scales by lam**alpha_max.
    """

    aniso: Anisotropy
    lam: float

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise ValueError("scale factor must be positive")

    @property
    def diag(self):
        return tuple(self.lam ** e for e in self.aniso.exponents())

    @property
    def det(self):
        return self.lam ** (self.aniso.alpha_max * self.aniso.beta)

    @property
    def time_factor(self):
        return self.lam ** self.aniso.alpha_max

    @property
    def energy_factor(self):
        """Multiplier on the axis-kernel energy of u composed with the map."""
        amax = self.aniso.alpha_max
        return self.lam ** (amax - amax * self.aniso.beta)

    def apply(self, x):
        return np.asarray(x, dtype=float) * np.asarray(self.diag)

    def inverse(self):
        return ScaleMap(self.aniso, 1.0 / self.lam)


def scale_map(aniso, lam):
    return ScaleMap(aniso, lam)


def cover(aniso, region, rho):
    """Cover ``region`` by metric balls of radius rho on an axis-aligned lattice.

    Centers sit on the lattice spaced by the ball half-width per axis, so every
    point of the region lies within half a spacing of some center (metric
    distance <= rho * max_k (1/2)**(alpha_k/alpha_max) < rho), and any pair
    x, y with metric distance <= rho lies inside the double of the ball
    whose center is nearest to x.

    Parameters
    ----------
    region : AnisoRect
        Region to cover; must sit inside the unit rectangle around its center.
    rho : float
        Ball radius, required in (0, 1/4).

    Returns
    -------
    list of AnisoRect with radius rho.
    """
    if not (0.0 < rho < 0.25):
        raise InvalidRadius(f"covering radius must lie in (0, 1/4), got {rho}")
    spacings = [rho ** e for e in aniso.exponents()]
    axes = []
    for c, hw, s in zip(region.center, region.half_widths, spacings):
        n = int(math.ceil(hw / s))
        axes.append(c + s * np.arange(-n, n + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=-1)
    return [rect(aniso, tuple(c), rho) for c in centers]
