"""Sampled verification of the elementary inequalities behind the iteration.

Two ingredients are checked numerically: the pointwise two-constant
inequality coupling (b-a)(t1^2 a^-p - t2^2 b^-p) to the square of the
power-difference, and the Lyapunov interpolation bound between the
L^{q/(q-1)}, L^{beta/(beta-1)} and L^1 norms.
"""

import numpy as np

from .errors import AnilapError

__all__ = [
    "ab_inequality_terms",
    "search_ab_constants",
    "interpolation_bound",
    "elementary_inequality_suite",
]


def ab_inequality_terms(a, b, p, t1, t2):
    """The three pieces of the two-constant inequality, vectorized.

    lhs = (b-a)(t1^2 a^-p - t2^2 b^-p)
    gain = (t1 a^{(1-p)/2} - t2 b^{(1-p)/2})^2
    penalty = p/(p-1) (t1-t2)^2 (a^{1-p} + b^{1-p})

    Feasible (c1, c2) satisfy lhs >= c1*gain - c2*penalty for all tuples.
    """
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    p = np.asarray(p, float)
    t1 = np.asarray(t1, float)
    t2 = np.asarray(t2, float)
    lhs = (b - a) * (t1 ** 2 * a ** (-p) - t2 ** 2 * b ** (-p))
    gain = (t1 * a ** ((1.0 - p) / 2.0) - t2 * b ** ((1.0 - p) / 2.0)) ** 2
    penalty = p / (p - 1.0) * (t1 - t2) ** 2 \
        * (a ** (1.0 - p) + b ** (1.0 - p))
    return lhs, gain, penalty


def _sample_tuples(samples, rng):
    a = 10.0 ** rng.uniform(-3.0, 3.0, samples)
    b = 10.0 ** rng.uniform(-3.0, 3.0, samples)
    p = rng.uniform(1.0, 20.0, samples)
    p = np.maximum(p, 1.0 + 1e-9)
    t1 = rng.uniform(0.0, 1.0, samples)
    t2 = rng.uniform(0.0, 1.0, samples)
    # force representation of the degenerate classes
    t2[: samples // 20] = t1[: samples // 20]
    b[samples // 20: samples // 10] = a[samples // 20: samples // 10]
    return a, b, p, t1, t2


def search_ab_constants(samples=1_000_000, seed=0, c1_grid=None, c2_cap=1e4):
    """Largest c1 (with its minimal c2 <= cap) feasible on a random sample.

    Raises AnilapError when no grid point is feasible, which would point
    to an implementation bug rather than sampling noise.
    """
    rng = np.random.default_rng(seed)
    a, b, p, t1, t2 = _sample_tuples(samples, rng)
    lhs, gain, penalty = ab_inequality_terms(a, b, p, t1, t2)

    if c1_grid is None:
        c1_grid = np.geomspace(2.0, 1e-4, 200)
    zero_pen = penalty <= 0.0
    hard = zero_pen & (gain > 0.0)
    # tuples with no penalty must be covered by c1 alone
    c1_ceiling = float(np.min(lhs[hard] / gain[hard])) if np.any(hard) \
        else np.inf
    live = ~zero_pen
    for c1 in np.sort(np.asarray(c1_grid))[::-1]:
        if c1 > c1_ceiling:
            continue
        deficit = c1 * gain[live] - lhs[live]
        c2 = float(np.max(deficit / penalty[live])) if np.any(live) else 0.0
        c2 = max(c2, 0.0)
        if c2 <= c2_cap:
            return {
                "c1": float(c1),
                "c2": c2,
                "c1_ceiling": c1_ceiling,
                "samples": int(samples),
                "violations": 0,
            }
    raise AnilapError("no feasible constant pair in the search box")


def interpolation_bound(f, q, beta, a, volume=1.0):
    """Both sides of the Lyapunov interpolation inequality on a grid.

    For q > beta > 1 and any a > 0,
    ||f||_{q/(q-1)} <= (beta/q) a ||f||_{beta/(beta-1)}
                       + ((q-beta)/q) a^{-beta/(q-beta)} ||f||_1
    with norms taken as uniform-cell quadratures of |f|.
    """
    if not q > beta > 1.0:
        raise AnilapError("need q > beta > 1")
    f = np.abs(np.asarray(f, float)).ravel()
    vol = volume / f.size

    def norm(r):
        return float((np.sum(f ** r) * vol) ** (1.0 / r))

    lhs = norm(q / (q - 1.0))
    rhs = (beta / q) * a * norm(beta / (beta - 1.0)) \
        + (q - beta) / q * a ** (-beta / (q - beta)) * norm(1.0)
    return lhs, rhs


def elementary_inequality_suite(samples=1_000_000, seed=0, q=3.0, beta=2.0,
                                a_values=(0.5, 1.0, 2.0), grid_n=512,
                                trials=5):
    """Constant search plus interpolation checks on random grid functions."""
    found = search_ab_constants(samples=samples, seed=seed)
    rng = np.random.default_rng(seed + 1)
    interp = []
    holds = True
    for _ in range(trials):
        f = rng.lognormal(0.0, 1.0, grid_n)
        for a in a_values:
            lhs, rhs = interpolation_bound(f, q, beta, a)
            interp.append((float(a), lhs, rhs))
            holds &= lhs <= rhs * (1.0 + 1e-12)
    lhs1, rhs1 = interpolation_bound(np.ones(grid_n), q, beta, 1.0)
    return {
        **found,
        "interp_holds": bool(holds),
        "interp_rows": interp,
        "constant_case": (lhs1, rhs1),
        "constant_case_equal": bool(abs(lhs1 - rhs1) < 1e-12),
        "q": float(q),
        "beta": float(beta),
    }
