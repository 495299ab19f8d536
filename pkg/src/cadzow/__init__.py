"""Weighted finite-rank approximation of time series by alternating
projections between rank-r matrices and the Hankel subspace."""

from .bench import (
    ExperimentResult,
    ExperimentSpec,
    NoiseModel,
    SignalModel,
    SignalTerm,
    alpha_sweep,
    generate,
    per_point_rmse,
    run_experiment,
    run_iteration_curves,
    sine_wave,
    wine_model_experiment,
    wine_sales_model,
)
from .lowrank import (
    EmResult,
    SvdFactors,
    em_weighted_project,
    numerical_rank,
    oblique_project,
    svd_factors,
    truncated_svd_project,
)
from .separability import (
    CombBound,
    SeparabilityReport,
    column_correlations,
    comb_correlation_bound,
    cosine_square_sum,
    cosine_sum,
    optimal_window,
    row_correlations,
    weak_separability,
)
from .series import (
    DegenerateWeightsError,
    as_series,
    diagonal_average,
    embed,
    project_hankel,
)
from .solvers import (
    ALGORITHMS,
    IterationRecord,
    SolverConfig,
    SolverTrace,
    adjust,
    cadzow,
    extended_cadzow,
    oblique_cadzow,
    solve,
    weighted_cadzow,
)
from .stopping import StopRule
from .weights import (
    alpha_metric,
    alpha_series_weights,
    averaged_metric,
    averaged_metric_profile,
    averaged_series_weights,
    matrix_weights_from_series,
    normalize_weights,
    series_weight_profile,
    series_weights_from_matrix,
    trapezoid_weights,
)

__version__ = "0.1.0"
