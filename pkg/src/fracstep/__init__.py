"""Convolution-quadrature time stepping for the subdiffusion equation.

The library covers the averaged Crank-Nicolson scheme, its corrected
variant, and the plain second-order backward-difference scheme, over a
spectral single-mode surrogate or a piecewise linear finite element
discretization of (0, pi), plus a convergence-study harness with CSV and
markdown reports.
"""

from .cq_weights import (
    GENERATOR_KINDS,
    Generator,
    WeightSequence,
    apply_discrete_derivative,
    averaged_weights,
    base_weights,
    consistency_residual,
    symbol,
)
from .experiments import (
    EXAMPLES,
    ConvergenceReport,
    ExperimentConfig,
    ReportRow,
    error_against_reference,
    has_exact_solution,
    make_problem,
    measure,
    reference_solution,
    theoretical_order,
)
from .mittag_leffler import mittag_leffler
from .reporting import emit, parse_csv, render_csv, render_markdown
from .spatial import (
    FemDiscretization,
    SpectralDiscretization,
    assemble_fem,
    assemble_spectral,
    l2_norm,
    load_vector,
    mass_apply,
    ritz_projection,
    solve_shifted,
    stiffness_apply,
)
from .stepping import (
    ProblemSpec,
    SchemeSpec,
    Trajectory,
    acn,
    bdf2_plain,
    error_norm,
    fast_history_sum,
    initial_state,
    macn,
    residue_term,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "GENERATOR_KINDS",
    "Generator",
    "WeightSequence",
    "apply_discrete_derivative",
    "averaged_weights",
    "base_weights",
    "consistency_residual",
    "symbol",
    "EXAMPLES",
    "ConvergenceReport",
    "ExperimentConfig",
    "ReportRow",
    "error_against_reference",
    "has_exact_solution",
    "make_problem",
    "measure",
    "reference_solution",
    "theoretical_order",
    "mittag_leffler",
    "emit",
    "parse_csv",
    "render_csv",
    "render_markdown",
    "FemDiscretization",
    "SpectralDiscretization",
    "assemble_fem",
    "assemble_spectral",
    "l2_norm",
    "load_vector",
    "mass_apply",
    "ritz_projection",
    "solve_shifted",
    "stiffness_apply",
    "ProblemSpec",
    "SchemeSpec",
    "Trajectory",
    "acn",
    "bdf2_plain",
    "error_norm",
    "fast_history_sum",
    "initial_state",
    "macn",
    "residue_term",
    "run",
    "__version__",
]
