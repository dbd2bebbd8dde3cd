"""polypass: spectral mountain-pass toolkit for polyharmonic semilinear
problems (-lap)^m u = f(x, u) on boxes with vanishing trace conditions.

Sine-basis Galerkin discretization, a nonlinearity catalog with
sample-based hypothesis verdicts, the energy functional with its Riesz
gradient, min-max solvers (mountain pass, symmetric multi-solution mode,
truncation continuation), and the integrability bootstrap.
"""

__version__ = "0.1.0"

from .backend import BACKEND
from .functional import (BootstrapTrace, PSRecord, bootstrap_chain,
                         derivative_pairing, energy, ps_diagnostics,
                         riesz_gradient)
from .grid import (Grid, SpectralField, apply_inverse_operator,
                   first_eigenpair, from_grid, inner_product_m, lp_norm,
                   mode_field, norm_m, polyharmonic_eigenvalue, to_grid,
                   zero_field)
from .hypotheses import (HYPOTHESIS_IDS, HypothesisReport, SamplingConfig,
                         applicable_hypotheses, check_hypothesis,
                         hypothesis_suite)
from .nonlinearity import (NonlinearitySpec, ParameterError, composite,
                           eval_F, eval_f, eval_fprime, iterated_log, linear,
                           linear_minus_power, log_damped_critical,
                           oscillating, positive_truncation, power,
                           spec_from_dict, spec_to_dict, truncate_at)
from .solver import (ContinuationSchedule, ContinuationTrace, FewerFound,
                     GeometryReport, MinMaxTrace, MPConfig, PreconditionError,
                     SolverError, StageRecord, ValleyNotFound,
                     continuation_solve, count_interior_zeros,
                     find_valley_endpoint, high_mode_threshold,
                     mountain_pass_geometry, mountain_pass_solve,
                     symmetric_mountain_pass)

__all__ = [
    "BACKEND",
    "__version__",
    "Grid", "SpectralField", "polyharmonic_eigenvalue", "first_eigenpair",
    "mode_field", "zero_field", "to_grid", "from_grid", "inner_product_m",
    "norm_m", "lp_norm", "apply_inverse_operator",
    "NonlinearitySpec", "ParameterError", "power", "linear",
    "linear_minus_power", "iterated_log", "log_damped_critical",
    "oscillating", "composite", "positive_truncation", "truncate_at",
    "eval_f", "eval_F", "eval_fprime", "spec_to_dict", "spec_from_dict",
    "HYPOTHESIS_IDS", "SamplingConfig", "HypothesisReport",
    "check_hypothesis", "hypothesis_suite", "applicable_hypotheses",
    "PSRecord", "BootstrapTrace", "energy", "riesz_gradient",
    "derivative_pairing", "ps_diagnostics", "bootstrap_chain",
    "MPConfig", "MinMaxTrace", "ContinuationSchedule", "ContinuationTrace",
    "StageRecord", "GeometryReport", "SolverError", "ValleyNotFound",
    "FewerFound", "PreconditionError", "find_valley_endpoint",
    "mountain_pass_solve", "symmetric_mountain_pass", "continuation_solve",
    "mountain_pass_geometry", "high_mode_threshold", "count_interior_zeros",
]
