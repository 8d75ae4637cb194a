"""Diagnostics for positive supersolutions.

Three related measurements on certified solver outputs: a pair-integral
bound on log-differences over concentric rectangles, positive/negative
power-mean products that flip the exponent sign, and the shrinking-radius
iteration table whose limit tracks the grid minimum.
"""

import math

import numpy as np

from .energy import pair_functional
from .errors import PreconditionViolation
from .geometry import rect
from .grids import GridFunction
from .solver import Solution

__all__ = [
    "require_certificate",
    "default_integrability",
    "log_moment_check",
    "flip_check",
    "moser_radii",
    "moser_sequence",
]


def require_certificate(sol):
    """Reject inputs that are not certified supersolutions.

    Hand-built grid functions would make every inequality below vacuous,
    so only Solution objects carrying a passing certificate are accepted.
    """
    if not isinstance(sol, Solution):
        raise PreconditionViolation(
            "expected a solver Solution, got %r" % type(sol).__name__)
    cert = sol.certificate
    if not cert or not cert.get("ok", False):
        raise PreconditionViolation(
            "input lacks a passing supersolution certificate")
    return sol


def default_integrability(aniso):
    """Source exponent q used by the harness: strictly above max{2, beta}."""
    return max(2.0, aniso.beta) + 0.5


def _block_values(u: GridFunction, region):
    sl = u.grid.slices_for(region)
    return u.values[sl]


def _source_norm(sol, region, q):
    """L^q norm of the interior source over region (zero outside interior)."""
    grid = sol.problem.grid
    f_win = np.zeros(grid.window_shape)
    grid.interior_view(f_win)[...] = sol.problem.rhs_interior()
    block = f_win[grid.slices_for(region)]
    return float((np.sum(np.abs(block) ** q) * grid.cell_volume) ** (1.0 / q))


def log_moment_check(kernel, sol, r, lam=2.0, eps=None, center=None, q=None):
    """Pair integral of cosh(log u(y) - log u(x)) - 1 over M_r x M_r.

    Compares against geometry * r^{-alpha_max} * |M_{lam r}| plus the
    eps^{-1} ||f||_q |M_{lam r}|^{q/(q-1)} source term and reports the
    constant the measured left side actually needs.
    """
    require_certificate(sol)
    aniso = kernel.aniso
    grid = sol.problem.grid
    if center is None:
        center = np.zeros(grid.d)
    if q is None:
        q = default_integrability(aniso)
    if lam <= 1.0:
        raise PreconditionViolation("outer rectangle needs lam > 1")
    outer = rect(aniso, center, lam * r)
    inner = rect(aniso, center, r)

    u_out = _block_values(sol.u, outer)
    floor = float(np.min(u_out))
    if eps is None:
        eps = floor
    if floor < eps or floor <= 0.0:
        raise PreconditionViolation(
            "positivity floor violated: min u = %.3g < eps = %.3g"
            % (floor, eps))

    def integrand(ux, uy):
        return np.cosh(np.log(uy) - np.log(ux)) - 1.0

    lhs = pair_functional(sol.u, kernel, integrand, inner)

    alpha = np.asarray(aniso.alpha, dtype=float)
    expo = aniso.alpha_max / alpha
    geom = float(np.sum((lam ** expo - 1.0) ** (-alpha)))
    vol_outer = float(np.prod(2.0 * np.asarray(outer.half_widths)))
    geom_term = geom * r ** (-aniso.alpha_max) * vol_outer

    fq = _source_norm(sol, outer, q)
    source_term = (fq / eps) * vol_outer ** (q / (q - 1.0))

    c1 = max(0.0, (lhs - source_term) / geom_term)
    return {
        "lhs": float(lhs),
        "geom_term": geom_term,
        "source_term": source_term,
        "c1_measured": c1,
        "ratio": float(lhs / (geom_term + source_term)),
        "eps": float(eps),
        "q": float(q),
        "r": float(r),
        "lam": float(lam),
    }


def _power_product(block, pbar):
    pos = float(np.mean(block ** pbar)) ** (1.0 / pbar)
    neg = float(np.mean(block ** (-pbar))) ** (1.0 / pbar)
    return pos * neg


def flip_check(kernel, family, r, pbars=(0.05, 0.1, 0.2, 0.4),
               center=None, q=None):
    """Products (avg u^p)^{1/p} (avg u^{-p})^{1/p} over M_r, scanned in p.

    A uniform family bound at some p is the sign-flip property; the
    log-BMO quantity mean((log u - [log u])^2) is reported alongside.
    """
    if q is None:
        q = default_integrability(kernel.aniso)
    if not family:
        raise PreconditionViolation("empty supersolution family")
    aniso = kernel.aniso
    region = rect(aniso, center if center is not None else
                  np.zeros(family[0].problem.grid.d), r)

    products = {p: [] for p in pbars}
    bmo = []
    for sol in family:
        require_certificate(sol)
        block = _block_values(sol.u, region)
        floor = float(np.min(block))
        if floor <= 0.0:
            raise PreconditionViolation(
                "negative powers not integrable: min u = %.3g" % floor)
        fq = _source_norm(sol, region, q)
        if floor <= r ** aniso.alpha_max * fq:
            raise PreconditionViolation(
                "positivity floor %.3g does not dominate source term %.3g"
                % (floor, r ** aniso.alpha_max * fq))
        for p in pbars:
            products[p].append(_power_product(block, p))
        logs = np.log(block)
        bmo.append(float(np.mean((logs - logs.mean()) ** 2)))

    worst = {p: float(np.max(vals)) for p, vals in products.items()}
    best_p = min(worst, key=worst.get)
    return {
        "products": {p: np.asarray(v) for p, v in products.items()},
        "family_bound": worst,
        "best_pbar": best_p,
        "best_bound": worst[best_p],
        "log_bmo": np.asarray(bmo),
        "log_bmo_bound": float(np.max(bmo)),
    }


def moser_radii(r, p0, beta, count):
    """Radius/exponent ladder: r_n = ((n+2)/(n+1)) r, p_n = p0 (beta/(beta-1))^n.

    Consecutive radii satisfy r_n = lam_n r_{n+1} with
    lam_n = (n+2)^2 / ((n+1)(n+3)); r_0 = 2r and r_n decreases to r.
    """
    if beta <= 1.0:
        raise PreconditionViolation("iteration ladder needs beta > 1")
    n = np.arange(count + 1)
    radii = (n + 2.0) / (n + 1.0) * r
    powers = p0 * (beta / (beta - 1.0)) ** n
    lams = (n + 2.0) ** 2 / ((n + 1.0) * (n + 3.0))
    return radii, powers, lams


def moser_sequence(kernel, sol, p0, r=0.5, count=6, center=None,
                   overflow=1e280):
    """Table A_n = (avg over M_{r_n} of u^{-p_n})^{-1/p_n}.

    Stops with a partial table once u^{-p_n} would overflow; the last
    entry approximates inf u over M_r from above.
    """
    require_certificate(sol)
    aniso = kernel.aniso
    grid = sol.problem.grid
    if center is None:
        center = np.zeros(grid.d)
    guard = _block_values(sol.u, rect(aniso, center, 2.0 * r))
    if np.min(guard) <= 0.0:
        raise PreconditionViolation(
            "u must be strictly positive on the starting rectangle")

    radii, powers, lams = moser_radii(r, p0, aniso.beta, count)
    table = []
    used = 0
    truncated = False
    log_cap = math.log(overflow)
    for rn, pn in zip(radii, powers):
        block = _block_values(sol.u, rect(aniso, center, rn))
        if pn * float(np.max(-np.log(block))) > log_cap:
            truncated = True
            break
        avg = float(np.mean(block ** (-pn)))
        if not np.isfinite(avg) or avg <= 0.0:
            truncated = True
            break
        table.append(avg ** (-1.0 / pn))
        used += 1

    if used == 0:
        raise PreconditionViolation("no usable iteration step before overflow")
    inner = _block_values(sol.u, rect(aniso, center, r))
    inf_val = float(np.min(inner))
    return {
        "radii": radii[:used],
        "powers": powers[:used],
        "lambdas": lams[:used],
        "table": np.asarray(table),
        "inf_value": inf_val,
        "factor": float(table[-1] / inf_val),
        "truncated": truncated,
        "steps": used,
    }
