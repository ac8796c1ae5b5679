"""Douglas-Rachford splitting for strongly convex + weakly convex objectives.

The solver minimizes h = f + g where f is strongly convex (a quadratic data
term, possibly subspace constrained) and g is a weakly convex separable
penalty such as the firm-thresholding penalty.  Besides the iteration engines
the package ships closed-form contraction-rate calculators with empirical
validation, and a sparse-deconvolution benchmark harness with a CLI.
"""

from .analysis import (
    contraction_rate_main,
    contraction_rate_shift,
    empirical_lipschitz,
    min_rate_main,
    rate_table,
    reflection_bound_smooth,
    reflection_bound_weak,
    shift_rate_floor,
)
from .errors import (
    BoundInapplicableError,
    DivergenceError,
    FactorizationError,
    FilterDesignError,
    InvalidFilterError,
    NonConvexShiftError,
    RankDeficiencyError,
    StepSizeError,
)
from .experiment import (
    EXP1,
    EXP2,
    ExperimentReport,
    ExperimentSpec,
    ProblemInstance,
    add_noise_snr,
    build_instance,
    build_subspace_demo,
    design_filter,
    generate_sparse_signal,
    run_experiment,
)
from .linalg import LinearMap, convolution_matrix, gram_extreme_eigenvalues, solve_spd
from .penalty import FirmPenalty, QuadraticPlusPenalty, SeparablePenalty, SoftPenalty, ZeroPenalty
from .smooth import (
    QuadraticTerm,
    SubspaceConstraint,
    SubspaceQuadraticTerm,
    project_onto_support,
)
from .solver import (
    VARIANTS,
    IterationTrace,
    Problem,
    SolverConfig,
    double_reflection,
    ista_step,
    reflect,
    run,
    validate_step_main,
    validate_step_shift,
)

__all__ = [
    "BoundInapplicableError",
    "DivergenceError",
    "EXP1",
    "EXP2",
    "ExperimentReport",
    "ExperimentSpec",
    "FactorizationError",
    "FilterDesignError",
    "FirmPenalty",
    "InvalidFilterError",
    "IterationTrace",
    "LinearMap",
    "NonConvexShiftError",
    "Problem",
    "ProblemInstance",
    "QuadraticPlusPenalty",
    "QuadraticTerm",
    "RankDeficiencyError",
    "SeparablePenalty",
    "SoftPenalty",
    "SolverConfig",
    "StepSizeError",
    "SubspaceConstraint",
    "SubspaceQuadraticTerm",
    "VARIANTS",
    "ZeroPenalty",
    "add_noise_snr",
    "build_instance",
    "build_subspace_demo",
    "contraction_rate_main",
    "contraction_rate_shift",
    "convolution_matrix",
    "design_filter",
    "double_reflection",
    "empirical_lipschitz",
    "generate_sparse_signal",
    "gram_extreme_eigenvalues",
    "ista_step",
    "min_rate_main",
    "project_onto_support",
    "rate_table",
    "reflect",
    "reflection_bound_smooth",
    "reflection_bound_weak",
    "run",
    "run_experiment",
    "shift_rate_floor",
    "solve_spd",
    "validate_step_main",
    "validate_step_shift",
]
