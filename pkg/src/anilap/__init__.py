"""Anisotropic nonlocal operators built from axis-aligned jump kernels.

The package measures what the continuum theory asserts: scaling
geometry of anisotropic rectangles, Levy integrability and symbols,
quadratic forms with exact far-field tails, certified Dirichlet solves,
embedding and Harnack-type inequalities, oscillation decay and Holder
exponents, stable-process Monte Carlo cross-checks, and a scalar-loop
reference implementation for equivalence testing.
"""

__version__ = "0.1.0"

from .errors import (AnilapError, BoundaryStencilError, ConfigError,
                     ExponentFitUnreliable, FitUnreliable, HorizonWarning,
                     IntegrabilityFailure, InvalidIndex, InvalidQuery,
                     InvalidRadius, OrderFitUnreliable, PreconditionViolation,
                     QuadratureResolutionError, SingularPoint,
                     SobolevExponentUndefined, SolveFailure,
                     SpectralPathUnavailable, SupportViolation, WindowError)
from .geometry import (Anisotropy, AnisoRect, ScaleMap, beta_theta, cover,
                       metric_dist, rect, scale_map)
from .kernels import (AxesKernel, IsotropicKernel, ModulatedAxesKernel,
                      check_levy_integrability, check_symmetry,
                      coeff_bump, coeff_checkerboard, coeff_constant,
                      coeff_onesided, comparability_estimate, tail_mass)
from .grids import (BoxData, CallableData, ExteriorData, ExteriorSum,
                    GridFunction, TensorGrid, Zero, axis_bump, constant_data,
                    half_line)
from .operator import (OperatorStencil, apply_operator, consistency_order,
                       cos_apply_study, multiplier, spectral_apply, symbol,
                       symbol_constant, symbol_constant_quadrature)
from .energy import (CutoffSpec, build_cutoff, carre_du_champ, cutoff_bounds,
                     energy_form, fourier_energy, multiplier_comparability,
                     norms, pair_functional, periodic_energy,
                     second_moment_field)
from .solver import (DirichletProblem, Solution, make_supersolution,
                     solve_dirichlet, verify_weak_solution)
from .embeddings import (poincare_check, sobolev_check, tail_measure_exact,
                         weak_tail_measure)
from .supersolutions import (default_integrability, flip_check,
                             log_moment_check, moser_radii, moser_sequence,
                             require_certificate)
from .harnack import (distant_bump_family, exterior_negative_tail,
                      negative_part_data, strong_harnack_probe,
                      weak_harnack_check)
from .oscillation import holder_fit, oscillation_decay, theory_delta
from .inequalities import (ab_inequality_terms, elementary_inequality_suite,
                           interpolation_bound, search_ab_constants)
from .mc import (StablePathConfig, empirical_cf, exit_time_scaling,
                 harmonic_measure_compare, hill_tail_index,
                 increment_independence, sample_stable, self_similarity_ks,
                 simulate_exit)
from .reference import brute_energy, brute_norms, brute_weight
from .config import (ExperimentConfig, emit_config, load_config, parse_config,
                     validate_config)
from .reports import Curve, ExperimentReport, Measurement, emit_report
from .runner import (EXPERIMENTS, default_config, experiment_names,
                     run_experiment, status_for)
