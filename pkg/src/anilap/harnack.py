"""Weak-Harnack deficit measurements and the strong-Harnack failure probe.

The deficit of a nonnegative certified supersolution u on the unit
rectangle is

    D(u) = c (avg over M_1/2 of u^p0)^(1/p0) - inf over M_1/4 of u
           - 2 sup over M_15/16 of the negative-part tail - ||f||_q

and the empirical Harnack constant is the largest c keeping D <= 0
across a whole family.  The probe drives exterior bumps concentrating
onto the first coordinate axis outward; the infimum bound survives while
the sup/inf ratio over the inner rectangle grows without apparent bound.
"""

import numpy as np

from .errors import PreconditionViolation
from .geometry import Anisotropy, rect
from .grids import (BoxData, CallableData, Constant, ExteriorSum, TensorGrid,
                    Zero, as_exterior)
from .kernels import AxesKernel
from .operator import OperatorStencil
from .solver import DirichletProblem, make_supersolution
from .supersolutions import default_integrability, require_certificate

__all__ = [
    "negative_part_data",
    "exterior_negative_tail",
    "weak_harnack_check",
    "distant_bump_family",
    "strong_harnack_probe",
]

P0_GRID = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5)


def negative_part_data(exterior):
    """Exterior data representing max(-g, 0); assumes disjoint bump supports."""
    exterior = as_exterior(exterior)
    if isinstance(exterior, Zero):
        return Zero()
    if isinstance(exterior, Constant):
        return Constant(max(-exterior.c, 0.0))
    if isinstance(exterior, BoxData):
        if exterior.height >= 0.0:
            return Zero()
        return BoxData(exterior.bounds, height=-exterior.height)
    if isinstance(exterior, ExteriorSum):
        parts = [negative_part_data(item) for item in exterior.items]
        parts = [p for p in parts if not isinstance(p, Zero)]
        if not parts:
            return Zero()
        return ExteriorSum(parts)
    if isinstance(exterior, CallableData):
        fn = exterior.fn
        return CallableData(lambda x: np.maximum(-np.asarray(fn(x)), 0.0))
    raise PreconditionViolation(
        "cannot form the negative part of %r" % type(exterior).__name__)


def exterior_negative_tail(sol, domain, probe, stencil=None):
    """T(x) = integral of u^- over the complement of `domain`, for x in `probe`.

    Window nodes outside `domain` contribute through the quadrature
    weights; mass beyond the window comes from the closed-form fiber
    tails of the negative part of the exterior data.  Returns the array
    of T values on `probe` nodes.
    """
    grid = sol.problem.grid
    if stencil is None:
        stencil = OperatorStencil(grid, sol.problem.kernel)
    field = np.maximum(-sol.u.values, 0.0)
    field[grid.slices_for(domain)] = 0.0
    inside = stencil.neighbor_sum(field)
    beyond = stencil.policy_tails(negative_part_data(sol.problem.g), power=1)
    return (inside + beyond)[grid.slices_for(probe)]


def _member_terms(kernel, sol, p0_grid, q, r, center):
    grid = sol.problem.grid
    aniso = kernel.aniso
    ctr = np.zeros(grid.d) if center is None else np.asarray(center, float)
    m_half = rect(aniso, ctr, 0.5 * r)
    m_quarter = rect(aniso, ctr, 0.25 * r)
    m_near = rect(aniso, ctr, 15.0 / 16.0 * r)
    m_unit = rect(aniso, ctr, r)

    u_unit = sol.u.values[grid.slices_for(m_unit)]
    if np.min(u_unit) < 0.0:
        raise PreconditionViolation(
            "weak Harnack needs u >= 0 on the unit rectangle, min = %.3g"
            % float(np.min(u_unit)))

    u_half = sol.u.values[grid.slices_for(m_half)]
    averages = {p0: float(np.mean(u_half ** p0)) ** (1.0 / p0)
                for p0 in p0_grid}
    inf_val = float(np.min(sol.u.values[grid.slices_for(m_quarter)]))
    tail = exterior_negative_tail(sol, m_unit, m_near)
    tail_sup = float(np.max(tail))

    f_win = np.zeros(grid.window_shape)
    grid.interior_view(f_win)[...] = sol.problem.rhs_interior()
    f_block = f_win[grid.slices_for(m_near)]
    fnorm = float((np.sum(np.abs(f_block) ** q) * grid.cell_volume)
                  ** (1.0 / q))
    return averages, inf_val, tail_sup, fnorm


def weak_harnack_check(kernel, family, p0_grid=P0_GRID, q=None, r=1.0,
                       center=None):
    """Largest c with deficit <= 0 for every member, scanned over p0.

    Members must be certified supersolutions, nonnegative on M_r.  An
    infinite tail term makes the bound hold trivially; such members are
    excluded from the calibration and flagged.
    """
    if q is None:
        q = default_integrability(kernel.aniso)
    if not family:
        raise PreconditionViolation("empty family")
    terms = []
    trivial = []
    for sol in family:
        require_certificate(sol)
        averages, inf_val, tail_sup, fnorm = _member_terms(
            kernel, sol, p0_grid, q, r, center)
        if not np.isfinite(tail_sup):
            trivial.append(True)
            continue
        trivial.append(False)
        terms.append((averages, inf_val, tail_sup, fnorm))

    if not terms:
        return {"p0": None, "c": np.inf, "deficits": [],
                "trivial": trivial, "q": q}

    ceiling = {p0: min((inf_val + tail_sup + fnorm) / averages[p0]
                       for averages, inf_val, tail_sup, fnorm in terms)
               for p0 in p0_grid}
    best_p0 = max(ceiling, key=ceiling.get)
    c = ceiling[best_p0] * (1.0 - 1e-9)
    deficits = [c * averages[best_p0] - inf_val - tail_sup - fnorm
                for averages, inf_val, tail_sup, fnorm in terms]
    return {
        "p0": best_p0,
        "c": c,
        "ceiling": ceiling,
        "deficits": np.asarray(deficits),
        "max_deficit": float(np.max(deficits)),
        "tail_sups": np.asarray([t[2] for t in terms]),
        "inf_values": np.asarray([t[1] for t in terms]),
        "trivial": trivial,
        "q": q,
    }


def distant_bump_family(kernel, grid, count=20, seed=0, tol=1e-9):
    """Nonnegative harmonic members driven by random far exterior bumps.

    Each member solves f = 0 with one positive box bump per axis placed
    outside the grid interior; the maximum principle keeps u >= 0.
    """
    rng = np.random.default_rng(seed)
    aniso = kernel.aniso
    d = grid.d
    members = []
    for _ in range(count):
        items = []
        k = int(rng.integers(d))
        e_k = aniso.alpha_max / aniso.alpha[k]
        # scale the draw so the bump clears the interior along its axis
        base = max(1.0, grid.interior.half_widths[k] ** (1.0 / e_k))
        start = (base * float(rng.uniform(1.5, 6.0))) ** e_k
        length = float(rng.uniform(0.5, 2.0))
        height = float(rng.uniform(0.2, 3.0))
        width = float(rng.uniform(0.2, 1.5))
        side = 1.0 if rng.random() < 0.5 else -1.0
        bounds = []
        for j in range(d):
            if j == k:
                bounds.append((side * start, side * start + length)
                              if side > 0 else (side * start - length,
                                                side * start))
            else:
                bounds.append((-width / 2.0, width / 2.0))
        items.append(BoxData(bounds, height=height))
        if rng.random() < 0.5:
            # overlapping supports are fine for first-power tails
            items.append(Constant(float(rng.uniform(0.05, 0.5))))
        ext = ExteriorSum(items) if len(items) > 1 else items[0]
        members.append(make_supersolution(
            DirichletProblem(kernel, grid, f=0.0, g=ext, tol=tol)))
    return members


def strong_harnack_probe(alpha=(0.5, 0.5), distances=(2.0, 4.0, 8.0), n=161,
                         pad_cells=16, length=1.0, tol=1e-10):
    """Sup/inf growth from exterior bumps concentrating onto the x1 axis.

    Each bump sits at gauge distance D along the first axis with
    cross-section shrinking like D^{-2}, so the family approaches data
    supported on the axis itself; the mass is rescaled with distance to
    keep magnitudes stable (the ratio is invariant under rescaling).
    Axis-aligned jumps only reach the bump from a thinning slab, so the
    ratio grows while the calibrated deficit stays nonpositive.
    """
    aniso = Anisotropy(alpha)
    kernel = AxesKernel(aniso)
    grid = TensorGrid.for_rect(aniso, rect(aniso, np.zeros(2), 1.0), n,
                               pad_cells=pad_cells)
    e1 = aniso.alpha_max / aniso.alpha[0]
    members = []
    geom = []
    for D in distances:
        offset = D ** e1
        thickness = 1.0 / D ** 2
        # exterior fibers are exact at any thickness; below one cell the
        # discrete family saturates and the sweep stops discriminating
        if thickness < grid.h[1]:
            raise PreconditionViolation(
                "bump cross-section %.3g saturates the %.3g-cell grid"
                % (thickness, grid.h[1]))
        height = (1.0 + D) ** (1.0 + aniso.alpha[0]) / (length * thickness)
        bump = BoxData([(offset, offset + length),
                        (-thickness / 2.0, thickness / 2.0)], height=height)
        members.append(make_supersolution(
            DirichletProblem(kernel, grid, f=0.0, g=bump, tol=tol)))
        geom.append((offset, thickness, height))

    m_quarter = grid.slices_for(rect(aniso, np.zeros(2), 0.25))
    sup = np.array([float(np.max(s.u.values[m_quarter])) for s in members])
    inf = np.array([float(np.min(s.u.values[m_quarter])) for s in members])
    check = weak_harnack_check(kernel, members)
    return {
        "distances": np.asarray(distances, float),
        "sup": sup,
        "inf": inf,
        "ratio": sup / inf,
        "growth": float((sup / inf)[-1] / (sup / inf)[0]),
        "deficits": check["deficits"],
        "max_deficit": check["max_deficit"],
        "c": check["c"],
        "p0": check["p0"],
        "geometry": geom,
    }
