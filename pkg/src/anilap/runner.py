"""Experiment registry and config-driven execution.

Each experiment wraps one capability of the library in a fixed recipe:
build the objects named by the config, measure, and judge the result
against an explicit tolerance.  Given the same config and seed the
emitted report files are byte-identical; wall-clock time is the only
nondeterministic output and lives in a sidecar.

Exit statuses: 0 = pass, 1 = flag, 2 = fail, 3 = error.
"""

import time
import warnings
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, data_value, emit_config
from .energy import CutoffSpec, cutoff_bounds, energy_form, norms
from .embeddings import poincare_check, sobolev_check, weak_tail_measure
from .errors import AnilapError, ConfigError, HorizonWarning
from .geometry import Anisotropy, rect
from .grids import (BoxData, CallableData, Constant, GridFunction, TensorGrid,
                    axis_bump, half_line)
from .harnack import distant_bump_family, strong_harnack_probe, \
    weak_harnack_check
from .inequalities import elementary_inequality_suite
from .kernels import (AxesKernel, IsotropicKernel, ModulatedAxesKernel,
                      check_levy_integrability, check_symmetry,
                      coeff_bump, coeff_checkerboard, coeff_constant,
                      coeff_onesided)
from .mc import (StablePathConfig, empirical_cf, exit_time_scaling,
                 harmonic_measure_compare, hill_tail_index,
                 increment_independence, sample_stable, self_similarity_ks)
from .operator import cos_apply_study
from .oscillation import holder_fit, oscillation_decay, theory_delta
from .reference import brute_energy, brute_norms
from .reports import Curve, ExperimentReport, Measurement, emit_report
from .solver import DirichletProblem, make_supersolution, solve_dirichlet, \
    verify_weak_solution
from .supersolutions import (default_integrability, flip_check,
                             log_moment_check, moser_sequence)

__all__ = [
    "EXPERIMENTS",
    "experiment_names",
    "default_config",
    "run_experiment",
    "status_for",
]

_COEFFS = {
    "constant": coeff_constant,
    "checkerboard": coeff_checkerboard,
    "bump": coeff_bump,
    "onesided": coeff_onesided,
}


def build_kernel(cfg: ExperimentConfig):
    aniso = Anisotropy(cfg.alpha)
    if cfg.kernel_kind == "axes":
        return AxesKernel(aniso)
    if cfg.kernel_kind == "modulated":
        return ModulatedAxesKernel(aniso, _COEFFS[cfg.kernel_coeff]())
    if len(set(cfg.alpha)) != 1:
        raise ConfigError("kernel.kind: isotropic needs equal alpha entries")
    return IsotropicKernel(cfg.d, cfg.alpha[0])


def build_grid(cfg: ExperimentConfig, aniso=None):
    aniso = aniso or Anisotropy(cfg.alpha)
    interior = rect(aniso, cfg.center, cfg.radius)
    return TensorGrid.for_rect(aniso, interior, cfg.nodes,
                               pad_cells=cfg.pad)


def build_source(cfg: ExperimentConfig):
    """Interior right-hand side from the data catalog."""
    base = cfg.f_name.partition(":")[0]
    if base == "zero":
        return 0.0
    if base == "constant":
        return data_value(cfg.f_name)
    center = np.asarray(cfg.center)
    width = cfg.r / 2.0

    def gauss(x):
        z = (np.asarray(x) - center) / width
        return np.exp(-np.sum(z * z, axis=-1))
    return gauss


def build_exterior(cfg: ExperimentConfig, aniso=None):
    """Exterior data from the catalog; shapes depend on the window rect."""
    aniso = aniso or Anisotropy(cfg.alpha)
    name = cfg.g_name
    base = name.partition(":")[0]
    if base == "zero":
        return "zero"
    if base == "constant":
        return Constant(data_value(name))
    window = rect(aniso, cfg.center, cfg.radius)
    hw = np.asarray(window.half_widths)
    if base == "gaussian":
        center = np.asarray(cfg.center)

        def gauss(x):
            z = (np.asarray(x) - center) / hw
            return np.exp(-np.sum(z * z, axis=-1))

        # profile factorizes over axes, so fiber tails reduce to 1-d
        # integrals; geometric panels resolve the power-law end, GL-16
        # the hump, and anything 9 widths past the center is zero
        gl_x, gl_w = np.polynomial.legendre.leggauss(16)

        def gauss_tail(kernel, x, k, side, T, power):
            wk = hw[k]
            perp = np.exp(-sum(((x[j] - center[j]) / hw[j]) ** 2
                               for j in range(len(hw)) if j != k))
            tstar = side * (center[k] - x[k])
            hi = tstar + 9.0 * wk / np.sqrt(power)
            lo = max(T, tstar - 9.0 * wk / np.sqrt(power))
            if hi <= lo:
                return 0.0
            edges = np.geomspace(lo, hi, 17)
            mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
            half = 0.5 * (edges[1:] - edges[:-1])[:, None]
            t = mid + half * gl_x[None, :]
            vals = (np.asarray(kernel.axis_density(k, t))
                    * np.exp(-power * ((t - tstar) / wk) ** 2))
            return float(perp ** power * np.sum(vals * half * gl_w[None, :]))

        return CallableData(gauss, tail_fn=gauss_tail)
    if base == "axis-bump":
        start = cfg.center[0] + hw[0] * 1.5
        return axis_bump(cfg.d, 0, start, hw[0], height=1.0,
                         thickness=2.0 * hw[-1], center=cfg.center)
    # half-line: indicator of the upper side beyond the window on axis 0
    return half_line(cfg.d, 0, cfg.center[0] + hw[0])


def build_problem(cfg: ExperimentConfig):
    kernel = build_kernel(cfg)
    grid = build_grid(cfg, getattr(kernel, "aniso", None))
    return DirichletProblem(kernel, grid, f=build_source(cfg),
                            g=build_exterior(cfg), tol=cfg.solver_tol)


def _resolved_q(cfg: ExperimentConfig):
    if cfg.q is not None:
        return cfg.q
    return max(2.0, cfg.beta) + 0.5


def _verdict(pass_ok, flag_ok, pass_reason="", flag_reason=""):
    if pass_ok:
        return "pass", pass_reason
    if flag_ok:
        return "flag", flag_reason or "within the flag band, not the target"
    return "fail", flag_reason or "outside tolerance"


@dataclass(frozen=True)
class ExperimentDef:
    name: str
    summary: str
    fn: object
    defaults: dict


EXPERIMENTS = {}


def _register(name, summary, **defaults):
    def deco(fn):
        EXPERIMENTS[name] = ExperimentDef(name, summary, fn, defaults)
        return fn
    return deco


def experiment_names():
    return sorted(EXPERIMENTS)


def default_config(name, seed=None, output=None):
    """Tuned, runnable config for a registered experiment."""
    if name not in EXPERIMENTS:
        raise ConfigError(
            "experiment: unknown experiment %r (try list-experiments)" % name)
    base = {"experiment": name, "alpha": (1.5, 0.5),
            "nodes": (65, 65), "center": (0.0, 0.0),
            "output": "runs/" + name}
    base.update(EXPERIMENTS[name].defaults)
    cfg = ExperimentConfig(**base)
    return cfg.with_overrides(seed=seed, output=output)


# --- geometry and kernels ----------------------------------------------------

@_register("geometry-doubling",
           "volume growth of metric rectangles under radius doubling")
def _geometry_doubling(cfg, jobs):
    aniso = Anisotropy(cfg.alpha)
    expected = 2.0 ** (aniso.alpha_max * aniso.beta)
    rows = []
    worst = 0.0
    for k in range(4):
        r = cfg.r * 2.0 ** k
        small = rect(aniso, cfg.center, r)
        big = rect(aniso, cfg.center, 2.0 * r)
        ratio = float(np.prod(2.0 * np.asarray(big.half_widths))
                      / np.prod(2.0 * np.asarray(small.half_widths)))
        rows.append((r, ratio, 0.0))
        worst = max(worst, abs(ratio / expected - 1.0))
    verdict, reason = _verdict(worst <= 1e-12, worst <= 1e-9)
    return {
        "measurements": {
            "doubling_ratio": Measurement(rows[0][1], 0.0, 1e-12, expected),
            "max_rel_error": Measurement(worst, 0.0, 1e-12, 0.0),
        },
        "bounds": {"expected_ratio": expected,
                   "volume_exponent": aniso.alpha_max * aniso.beta},
        "curves": (Curve("doubling", "r", tuple(rows)),),
        "verdict": verdict, "reason": reason,
    }


@_register("levy-integrability",
           "second-moment integrability and symmetry of the jump kernel")
def _levy_integrability(cfg, jobs):
    kernel = build_kernel(cfg)
    aniso = Anisotropy(cfg.alpha)
    worst = check_levy_integrability(kernel, seed=cfg.seed)
    expected = 4.0 * cfg.d
    a = rect(aniso, cfg.center, cfg.r)
    shift = np.zeros(cfg.d)
    shift[0] = a.half_widths[0] * 2.5
    b = rect(aniso, tuple(np.asarray(cfg.center) + shift), cfg.r)
    iab, iba, gap = check_symmetry(kernel, a, b)
    axes_exact = cfg.kernel_kind == "axes"
    mtol = 5e-3 if axes_exact else np.inf
    m_ok = (abs(worst / expected - 1.0) <= mtol) if axes_exact \
        else np.isfinite(worst)
    verdict, reason = _verdict(m_ok and gap <= 1e-3,
                               np.isfinite(worst) and gap <= 1e-2)
    return {
        "measurements": {
            "second_moment_sup": Measurement(worst, 0.0, mtol, expected
                                             if axes_exact else None),
            "symmetry_gap": Measurement(gap, 0.0, 1e-3, 0.0),
        },
        "bounds": {"axes_exact_value": expected},
        "details": {"mass_a_to_b": iab, "mass_b_to_a": iba},
        "curves": (),
        "verdict": verdict, "reason": reason,
    }


@_register("symbol-consistency",
           "quadrature operator against the exact symbol on cosine waves",
           alpha=(0.9,), nodes=(65,), center=(0.0,))
def _symbol_consistency(cfg, jobs):
    study = cos_apply_study(cfg.alpha[0], xi=1.0)
    # error is absolute on a unit-amplitude wave; symbol value sets the scale
    from .operator import symbol_constant
    scale = symbol_constant(cfg.alpha[0])
    rel = [e / scale for e in study["error"]]
    rows = tuple((h, e, 0.0) for h, e in zip(study["h"], study["error"]))
    order_lo = min(cfg.alpha[0], 2.0 - cfg.alpha[0])
    fit_ok = study["order"] >= order_lo - 0.25 and study["r2"] >= 0.9
    verdict, reason = _verdict(rel[-1] <= 0.02 and fit_ok,
                               rel[-1] <= 0.05)
    return {
        "measurements": {
            "relative_error_finest": Measurement(rel[-1], 0.0, 0.02, 0.0),
            "fitted_order": Measurement(study["order"], 0.0, 0.25, order_lo),
        },
        "bounds": {"min_order": order_lo, "symbol_scale": scale},
        "details": {"fit_r2": study["r2"]},
        "curves": (Curve("refinement", "h", rows),),
        "verdict": verdict, "reason": reason,
    }


@_register("cutoff-bounds",
           "carre-du-champ of trapezoid cutoffs against the scale bound")
def _cutoff_bounds(cfg, jobs):
    kernel = build_kernel(cfg)
    rows = []
    worst = 0.0
    for k in range(3):
        r = cfg.r * 2.0 ** (-k)
        spec = CutoffSpec(tuple(cfg.center), r, cfg.lam)
        got = cutoff_bounds(kernel, spec, n=cfg.nodes[0])
        rows.append((r, got.measured, 0.0))
        worst = max(worst, got.measured / got.bound)
    verdict, reason = _verdict(worst <= 1.0, worst <= 1.1)
    return {
        "measurements": {
            "sup_carre_over_bound": Measurement(worst, 0.0, 1.0, None),
        },
        "bounds": {"bound_ratio_max": 1.0},
        "curves": (Curve("carre", "r", tuple(rows)),),
        "verdict": verdict, "reason": reason,
    }


# --- embeddings ---------------------------------------------------------------

@_register("sobolev-ratio",
           "Sobolev quotients and their invariance under the scale map",
           nodes=(49, 49))
def _sobolev_ratio(cfg, jobs):
    aniso = Anisotropy(cfg.alpha)
    out = sobolev_check(aniso, trials=10, n=cfg.nodes[0], seed=cfg.seed,
                        localized=(cfg.r, cfg.lam))
    rows = tuple((float(i), v, 0.0) for i, v in enumerate(out["ratios"]))
    drift_ok = out["max_drift"] <= 0.05
    verdict, reason = _verdict(drift_ok, out["max_drift"] <= 0.10)
    return {
        "measurements": {
            "max_drift": Measurement(out["max_drift"], 0.0, 0.05, 0.0),
            "max_ratio": Measurement(out["max_ratio"], 0.0, np.inf, None),
            "localized_constant": Measurement(out["localized"]["c1"], 0.0,
                                              np.inf, None),
        },
        "bounds": {"theta": out["theta"]},
        "curves": (Curve("ratios", "trial", rows),),
        "verdict": verdict, "reason": reason,
    }


@_register("tail-measure",
           "sublevel measure of the symbol against the predicted power",
           paths=200_000)
def _tail_measure(cfg, jobs):
    aniso = Anisotropy(cfg.alpha)
    out = weak_tail_measure(aniso, samples=cfg.paths, seed=cfg.seed)
    rows = tuple(zip(out["t"], out["measure"], out["stderr"]))
    err = abs(out["slope"] - out["expected"])
    verdict, reason = _verdict(err <= 0.15, err <= 0.30)
    return {
        "measurements": {
            "fitted_slope": Measurement(out["slope"], 0.0, 0.15,
                                        out["expected"]),
        },
        "bounds": {"expected_slope": out["expected"]},
        "details": {"exact_measures": list(out["exact"])},
        "curves": (Curve("sublevel", "t", rows),),
        "verdict": verdict, "reason": reason,
    }


@_register("poincare-scaling",
           "mean-oscillation to energy ratio across shrinking rectangles",
           nodes=(33, 33))
def _poincare_scaling(cfg, jobs):
    kernel = build_kernel(cfg)
    aniso = Anisotropy(cfg.alpha)
    curves = []
    slopes = {}
    for pattern in ("linear-x1", "checkerboard"):
        out = poincare_check(kernel, pattern, n=cfg.nodes[0],
                             center=cfg.center)
        curves.append(Curve("ratio-" + pattern, "r",
                            tuple((r, v, 0.0)
                                  for r, v in zip(out["r"], out["ratio"]))))
        slopes[pattern] = out["slope"]
    target = aniso.alpha_max
    worst = min(slopes.values())
    verdict, reason = _verdict(worst >= target - 0.1, worst >= target - 0.3)
    meas = {("slope_" + k.replace("-", "_")): Measurement(v, 0.0, 0.1, target)
            for k, v in slopes.items()}
    return {
        "measurements": meas,
        "bounds": {"expected_slope": target},
        "curves": tuple(curves),
        "verdict": verdict, "reason": reason,
    }


# --- solver -------------------------------------------------------------------

@_register("solver-soundness",
           "discrete solve plus exact weak-form duality certificate",
           f_name="constant:1.0", g_name="zero", radius=1.0)
def _solver_soundness(cfg, jobs):
    problem = build_problem(cfg)
    sol = solve_dirichlet(problem)
    worst = verify_weak_solution(problem.kernel, problem.grid.interior,
                                 sol.u, problem.rhs_interior())
    vol = problem.grid.cell_volume
    threshold = 10.0 * cfg.solver_tol * vol * max(1.0, sol.bnorm)
    ok = sol.converged and worst <= threshold
    verdict, reason = _verdict(ok, worst <= 10 * threshold)
    return {
        "measurements": {
            "duality_defect": Measurement(worst, 0.0, threshold, 0.0),
            "residual": Measurement(sol.residual, 0.0, cfg.solver_tol, 0.0),
            "peak_value": Measurement(float(np.max(np.abs(sol.u.values))),
                                      0.0, np.inf, None),
        },
        "bounds": {"defect_threshold": threshold},
        "details": {"iterations": int(sol.iterations),
                    "converged": bool(sol.converged),
                    "tail_error": float(sol.tail_error)},
        "curves": (),
        "verdict": verdict, "reason": reason,
    }


# --- supersolution diagnostics --------------------------------------------------

@_register("log-moment",
           "pair functional of the log of a positive supersolution",
           g_name="constant:0.1")
def _log_moment(cfg, jobs):
    problem = build_problem(cfg)
    sol = make_supersolution(problem)
    out = log_moment_check(problem.kernel, sol, cfg.r, lam=cfg.lam,
                           q=_resolved_q(cfg), center=cfg.center)
    verdict, reason = _verdict(out["ratio"] <= 1.0, out["ratio"] <= 1.5)
    return {
        "measurements": {
            "lhs": Measurement(out["lhs"], 0.0, np.inf, None),
            "lhs_over_rhs": Measurement(out["ratio"], 0.0, 1.0, None),
            "c1_measured": Measurement(out["c1_measured"], 0.0, np.inf, None),
        },
        "bounds": {"geometric_term": out["geom_term"],
                   "source_term": out["source_term"]},
        "details": {"eps": out["eps"], "q": out["q"]},
        "curves": (),
        "verdict": verdict, "reason": reason,
    }


@_register("flip-product",
           "positive-negative power products over a harmonic family")
def _flip_product(cfg, jobs):
    kernel = build_kernel(cfg)
    grid = build_grid(cfg)
    family = distant_bump_family(kernel, grid, count=8, seed=cfg.seed,
                                 tol=cfg.solver_tol)
    out = flip_check(kernel, family, cfg.r, center=cfg.center,
                     q=_resolved_q(cfg))
    prods = out["products"][out["best_pbar"]]
    rows = tuple((float(i), float(p), 0.0) for i, p in enumerate(prods))
    finite = bool(np.all(np.isfinite(prods)))
    above_one = float(np.min(prods)) >= 1.0 - 1e-9
    verdict, reason = _verdict(finite and above_one, finite)
    return {
        "measurements": {
            "family_bound": Measurement(out["best_bound"], 0.0, np.inf, None),
            "min_product": Measurement(float(np.min(prods)), 0.0, 1e-9, 1.0),
            "log_bmo_bound": Measurement(out["log_bmo_bound"], 0.0, np.inf,
                                         None),
        },
        "bounds": {"product_floor": 1.0},
        "details": {"best_pbar": out["best_pbar"]},
        "curves": (Curve("products", "member", rows),),
        "verdict": verdict, "reason": reason,
    }


@_register("moser-ladder",
           "negative-power averages marching down to the infimum",
           g_name="constant:0.1")
def _moser_ladder(cfg, jobs):
    problem = build_problem(cfg)
    sol = make_supersolution(problem)
    out = moser_sequence(problem.kernel, sol, p0=0.3, r=cfg.r,
                         center=cfg.center)
    rows = tuple((float(p), float(a), 0.0)
                 for p, a in zip(out["powers"], out["table"]))
    factor = out["factor"]
    verdict, reason = _verdict(factor >= 0.99 and not out["truncated"],
                               factor >= 0.9)
    return {
        "measurements": {
            "final_over_inf": Measurement(factor, 0.0, 0.01, 1.0),
            "inf_value": Measurement(out["inf_value"], 0.0, np.inf, None),
        },
        "bounds": {"ladder_floor": 1.0},
        "details": {"steps": out["steps"], "truncated": out["truncated"]},
        "curves": (Curve("ladder", "power", rows),),
        "verdict": verdict, "reason": reason,
    }


# --- Harnack ------------------------------------------------------------------

@_register("weak-harnack",
           "infimum versus small positive power average for a family",
           r=1.0, radius=2.0)
def _weak_harnack(cfg, jobs):
    kernel = build_kernel(cfg)
    grid = build_grid(cfg)
    family = distant_bump_family(kernel, grid, count=20, seed=cfg.seed,
                                 tol=cfg.solver_tol)
    out = weak_harnack_check(kernel, family, r=cfg.r, center=cfg.center,
                             q=_resolved_q(cfg))
    rows = tuple((float(i), float(d), 0.0)
                 for i, d in enumerate(out["deficits"]))
    max_def = out["max_deficit"]
    trivial = int(np.sum(out["trivial"])) if len(out["trivial"]) else 0
    ok = max_def <= 1e-8 and trivial == 0
    verdict, reason = _verdict(
        ok, max_def <= 1e-6,
        flag_reason="%d trivial members" % trivial if trivial else "")
    return {
        "measurements": {
            "max_deficit": Measurement(max_def, 0.0, 1e-8, 0.0),
            "constant": Measurement(out["c"], 0.0, np.inf, None),
        },
        "bounds": {"deficit_ceiling": 0.0},
        "details": {"best_p0": out["p0"], "trivial_members": trivial,
                    "q": out["q"]},
        "curves": (Curve("deficits", "member", rows),),
        "verdict": verdict, "reason": reason,
    }


@_register("strong-harnack-probe",
           "sup/inf blow-up for data concentrating onto an axis",
           alpha=(0.5, 0.5), nodes=(161, 161), pad=16)
def _strong_harnack(cfg, jobs):
    out = strong_harnack_probe(alpha=cfg.alpha, n=cfg.nodes[0],
                               pad_cells=cfg.pad, tol=cfg.solver_tol)
    rows = tuple((float(d), float(s), 0.0)
                 for d, s in zip(out["distances"], out["ratio"]))
    growth_ok = out["growth"] >= 5.0
    deficit_ok = out["max_deficit"] <= 1e-8
    verdict, reason = _verdict(growth_ok and deficit_ok,
                               out["growth"] >= 3.0 and deficit_ok)
    return {
        "measurements": {
            "ratio_growth": Measurement(out["growth"], 0.0, 5.0, None),
            "max_weak_deficit": Measurement(out["max_deficit"], 0.0, 1e-8,
                                            0.0),
        },
        "bounds": {"growth_floor": 5.0},
        "details": {"weak_constant": out["c"], "p0": out["p0"],
                    "geometry": [{"offset": float(o), "thickness": float(t),
                                  "height": float(h)}
                                 for o, t, h in out["geometry"]]},
        "curves": (Curve("supinf", "distance", rows),),
        "verdict": verdict, "reason": reason,
    }


# --- regularity ---------------------------------------------------------------

def _regularity_solution(cfg):
    # the regularity diagnostics require a certified solve
    problem = build_problem(cfg)
    return problem, make_supersolution(problem)


@_register("oscillation-decay",
           "oscillation of the solution across nested rectangles",
           nodes=(129, 129), r=1.0, theta=2.0 ** 0.5, lam=1.3, sigma=1.2)
def _oscillation_decay(cfg, jobs):
    problem, sol = _regularity_solution(cfg)
    out = oscillation_decay(problem.kernel, sol, x0=cfg.center, r=cfg.r,
                            theta=cfg.theta, lam=cfg.lam, sigma=cfg.sigma)
    rows = tuple((float(r), float(o), 0.0)
                 for r, o in zip(out["radii"], out["oscillations"]))
    theory = theory_delta(2.0, 0.1, cfg.theta)
    ok = out["delta"] > 0.0 and out["r2"] >= 0.8 and not out["constant"]
    verdict, reason = _verdict(ok, out["delta"] > 0.0 and out["r2"] >= 0.5)
    return {
        "measurements": {
            "decay_exponent": Measurement(out["delta"], 0.0, np.inf, None),
            "fit_r2": Measurement(out["r2"], 0.0, 0.2, 1.0),
        },
        "bounds": {"theory_floor": theory["delta"]},
        "details": {"rate": out["rate"], "geometric": out["geometric"],
                    "theory_kappa": theory["kappa"]},
        "curves": (Curve("oscillation", "r", rows),),
        "verdict": verdict, "reason": reason,
    }


@_register("holder-fit",
           "pointwise regularity exponents in both distance gauges",
           nodes=(129, 129), r=1.0)
def _holder_fit(cfg, jobs):
    problem, sol = _regularity_solution(cfg)
    out = holder_fit(problem.kernel, sol, r=cfg.r, seed=cfg.seed,
                     q=_resolved_q(cfg))
    aniso = Anisotropy(cfg.alpha)
    axes = out["axis_exponents"]
    rows = tuple((float(k), float(e), 0.0) for k, e in enumerate(axes))
    order = np.argsort(cfg.alpha)
    ordered = bool(np.all(np.diff(np.asarray(axes)[order]) >= -0.1))
    # log-log scatter in the metric gauge is wide by nature, so the fit
    # quality is reported but not gated; the gauge relation is the test
    ok = (out["metric"] >= out["gauge_floor"] - 0.05 and ordered
          and out["metric"] > 0.0 and out["euclid"] > 0.0
          and out["pairs_used"] >= 1000)
    verdict, reason = _verdict(ok, out["metric"] > 0.0)
    return {
        "measurements": {
            "metric_exponent": Measurement(out["metric"], 0.0, 0.05,
                                           out["gauge_floor"]),
            "euclid_exponent": Measurement(out["euclid"], 0.0, np.inf, None),
        },
        "bounds": {"gauge_floor": out["gauge_floor"],
                   "alpha_ratio": aniso.alpha_max / min(cfg.alpha)},
        "details": {"metric_r2": out["metric_r2"],
                    "euclid_r2": out["euclid_r2"],
                    "axis_exponents": list(axes),
                    "pairs_used": out["pairs_used"]},
        "curves": (Curve("axis-exponents", "axis", rows),),
        "verdict": verdict, "reason": reason,
    }


# --- scalar inequalities --------------------------------------------------------

@_register("ab-inequality",
           "two-constant search for the weighted power-difference bound",
           alpha=(1.5, 0.5), paths=200_000)
def _ab_inequality(cfg, jobs):
    q = _resolved_q(cfg)
    out = elementary_inequality_suite(samples=cfg.paths, seed=cfg.seed,
                                      q=q, beta=cfg.beta)
    ok = (out["violations"] == 0 and out["interp_holds"]
          and out["constant_case_equal"] and out["c1"] > 0.0)
    verdict, reason = _verdict(ok, out["violations"] == 0)
    return {
        "measurements": {
            "c1": Measurement(out["c1"], 0.0, np.inf, None),
            "c2": Measurement(out["c2"], 0.0, np.inf, None),
            "violations": Measurement(float(out["violations"]), 0.0, 0.0,
                                      0.0),
        },
        "bounds": {"c1_ceiling": out["c1_ceiling"]},
        "details": {"samples": out["samples"],
                    "interp_holds": out["interp_holds"],
                    "constant_case_equal": out["constant_case_equal"],
                    "q": out["q"], "beta": out["beta"]},
        "curves": (),
        "verdict": verdict, "reason": reason,
    }


# --- Monte Carlo ---------------------------------------------------------------

def _mc_config(cfg):
    return StablePathConfig(aniso=Anisotropy(cfg.alpha), dt=cfg.dt,
                            seed=cfg.seed, horizon=cfg.horizon)


@_register("exit-scaling",
           "mean exit time ratio under doubling of the gauge radius",
           r=0.25, dt=2e-4, paths=100_000, seed=42)
def _exit_scaling(cfg, jobs):
    out = exit_time_scaling(_mc_config(cfg), r=cfg.r, n_paths=cfg.paths,
                            center=cfg.center, workers=jobs)
    half = 0.5 * (out["ci"][1] - out["ci"][0])
    rows = tuple((float(dt), float(r), float(h))
                 for dt, r, h in out["history"])
    err = abs(out["ratio"] - out["expected"])
    verdict, reason = _verdict(out["covered"], err <= 2.0 * half)
    return {
        "measurements": {
            "exit_ratio": Measurement(out["ratio"], half, half,
                                      out["expected"]),
        },
        "bounds": {"expected_ratio": out["expected"]},
        "details": {"dt_used": out["dt_used"], "covered": out["covered"],
                    "refinements": len(out["history"]) - 1},
        "curves": (Curve("refinement", "dt", rows),),
        "verdict": verdict, "reason": reason,
    }


@_register("harmonic-measure",
           "MC hitting probability against the solver's harmonic measure",
           alpha=(1.0,), nodes=(257,), center=(0.0,), radius=1.0, r=1.0,
           dt=5e-4, horizon=100.0, paths=100_000, seed=7,
           g_name="half-line", pad=32)
def _harmonic_measure(cfg, jobs):
    aniso = Anisotropy(cfg.alpha)
    box = rect(aniso, cfg.center, cfg.r)
    hw = np.asarray(box.half_widths)
    thr = cfg.center[0] + hw[0]

    def target(pts):
        return np.asarray(pts)[..., 0] > thr
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HorizonWarning)
        out = harmonic_measure_compare(
            _mc_config(cfg), box, target, np.asarray(cfg.center),
            n_paths=cfg.paths, grid_nodes=cfg.nodes[0], pad_cells=cfg.pad,
            tol=cfg.solver_tol, workers=jobs)
    z = abs(out["z"])
    verdict, reason = _verdict(z <= 3.0, z <= 4.0)
    return {
        "measurements": {
            "mc_probability": Measurement(out["mc"], out["stderr"],
                                          3.0 * out["stderr"],
                                          out["solver"]),
            "z_score": Measurement(out["z"], 1.0, 3.0, 0.0),
        },
        "bounds": {"solver_probability": out["solver"]},
        "details": {"unexited": out["unexited"]},
        "curves": (),
        "verdict": verdict, "reason": reason,
    }


@_register("stable-sanity",
           "distributional checks of the stable increment sampler",
           alpha=(1.2, 0.6), paths=200_000, dt=1e-3)
def _stable_sanity(cfg, jobs):
    a0 = cfg.alpha[0]
    samples = sample_stable(a0, cfg.paths, seed=cfg.seed)
    xi = np.array([0.5, 1.0, 2.0])
    means, errs = empirical_cf(samples, xi)
    target = np.exp(-np.abs(xi) ** a0)
    zmax = float(np.max(np.abs(means - target) / errs))
    hill = hill_tail_index(samples)
    hill_err = abs(hill - a0) / a0
    mccfg = _mc_config(cfg)
    indep = increment_independence(mccfg, n=min(cfg.paths, 100_000)) \
        if cfg.d > 1 else {"max_abs_corr": 0.0, "bound": 1.0}
    ks = self_similarity_ks(mccfg, r=cfg.r / 2.0, n_paths=20_000)
    rows = tuple((float(x), float(m), float(e))
                 for x, m, e in zip(xi, means, errs))
    ok = (zmax <= 3.0 and hill_err <= 0.15
          and indep["max_abs_corr"] <= indep["bound"]
          and ks["min_pvalue"] >= 1e-3)
    verdict, reason = _verdict(ok, zmax <= 4.0 and hill_err <= 0.25)
    return {
        "measurements": {
            "cf_max_z": Measurement(zmax, 1.0, 3.0, 0.0),
            "hill_index": Measurement(hill, a0 * 0.15, a0 * 0.15, a0),
            "cross_axis_corr": Measurement(indep["max_abs_corr"], 0.0,
                                           indep["bound"], 0.0),
            "ks_min_pvalue": Measurement(ks["min_pvalue"], 0.0, 1e-3, None),
        },
        "bounds": {"cf_targets": list(target)},
        "details": {"ks_pvalues": list(ks["pvalues"])},
        "curves": (Curve("cf", "xi", rows),),
        "verdict": verdict, "reason": reason,
    }


# --- reference ------------------------------------------------------------------

@_register("brute-compare",
           "vectorized energies and norms against scalar-loop reference",
           nodes=(9, 9), radius=1.0, pad=2, g_name="axis-bump")
def _brute_compare(cfg, jobs):
    if max(cfg.nodes) > 13:
        raise ConfigError("grid.nodes: brute-compare needs at most 13 nodes "
                          "per axis to finish in time")
    kernel = build_kernel(cfg)
    grid = build_grid(cfg)
    rng = np.random.default_rng(cfg.seed)
    vals = rng.standard_normal(grid.window_shape)
    region = rect(Anisotropy(cfg.alpha), cfg.center, cfg.radius)
    rows = []
    worst = 0.0

    def record(label, fast, slow):
        nonlocal worst
        scale = max(abs(slow), 1e-300)
        rel = abs(fast - slow) / scale
        rows.append((float(len(rows)), rel, 0.0))
        worst = max(worst, rel)

    u = GridFunction(grid, vals, exterior=build_exterior(cfg))
    record("energy-all", energy_form(kernel, None, u, u),
           brute_energy(kernel, None, u, u))
    record("energy-region", energy_form(kernel, region, u, u),
           brute_energy(kernel, region, u, u))
    sub = rect(Anisotropy(cfg.alpha), cfg.center, cfg.radius / 2.0)
    inner = np.zeros(grid.window_shape)
    sl = grid.slices_for(sub)
    inner[sl] = rng.standard_normal(inner[sl].shape)
    u2 = GridFunction(grid, inner)
    fast = norms(kernel, sub, u2)
    slow_v2, slow_h2 = brute_norms(kernel, sub, u2)
    record("norm-v2", fast.v2, slow_v2)
    record("norm-h2", fast.h2, slow_h2)
    verdict, reason = _verdict(worst <= 1e-10, worst <= 1e-8)
    return {
        "measurements": {
            "worst_rel_error": Measurement(worst, 0.0, 1e-10, 0.0),
        },
        "bounds": {"tolerance": 1e-10},
        "details": {"cases": ["energy-all", "energy-region",
                              "norm-v2", "norm-h2"]},
        "curves": (Curve("relative-errors", "case", tuple(rows)),),
        "verdict": verdict, "reason": reason,
    }


# --- execution ------------------------------------------------------------------

def status_for(verdict):
    return {"pass": 0, "flag": 1, "fail": 2, "error": 3}[verdict]


def _parameters(cfg: ExperimentConfig):
    return {
        "experiment": cfg.experiment,
        "alpha": list(cfg.alpha),
        "kernel": {"kind": cfg.kernel_kind, "coeff": cfg.kernel_coeff},
        "grid": {"nodes": list(cfg.nodes), "radius": cfg.radius,
                 "pad": cfg.pad},
        "domain": {"center": list(cfg.center), "r": cfg.r, "lam": cfg.lam,
                   "theta": cfg.theta, "sigma": cfg.sigma},
        "data": {"f": cfg.f_name, "g": cfg.g_name},
        "mc": {"paths": cfg.paths, "dt": cfg.dt, "horizon": cfg.horizon},
        "seed": cfg.seed,
        "tolerances": {"solver": cfg.solver_tol, "q": cfg.q},
    }


def run_experiment(cfg: ExperimentConfig, jobs=1, out_dir=None, emit=True):
    """Execute one experiment and (optionally) write its report files.

    Returns (report, status).  Module errors become a verdict-"error"
    report rather than an exception, so a failed run still leaves a
    record on disk.
    """
    if cfg.experiment not in EXPERIMENTS:
        raise ConfigError("experiment: unknown experiment %r "
                          "(try list-experiments)" % cfg.experiment)
    entry = EXPERIMENTS[cfg.experiment]
    start = time.perf_counter()
    try:
        result = entry.fn(cfg, max(1, int(jobs)))
        if not result.get("measurements"):
            result = {"measurements": {}, "curves": (),
                      "verdict": "error",
                      "reason": "empty measurement set"}
    except AnilapError as exc:
        result = {"measurements": {}, "curves": (), "verdict": "error",
                  "reason": "%s: %s" % (type(exc).__name__, exc)}
    runtime = time.perf_counter() - start

    report = ExperimentReport(
        experiment=cfg.experiment,
        parameters=_parameters(cfg),
        measurements=result.get("measurements", {}),
        bounds=result.get("bounds", {}),
        details=result.get("details", {}),
        curves=tuple(result.get("curves", ())),
        verdict=result["verdict"],
        reason=result.get("reason", ""),
        runtime_seconds=runtime,
    )
    if emit:
        emit_report(report, out_dir or cfg.output,
                    config_text=emit_config(cfg))
    return report, status_for(report.verdict)
