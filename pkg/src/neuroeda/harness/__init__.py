"""Experiment files, seeded trial execution, grid search and model introspection."""
from .analysis import (
    analyze_covariance, analyze_diversity, clamp_study, group_indicators, knn_mean_distances,
    rr_linkage_groups,
)
from .config import DEFAULT_GRID, ExperimentSpec, load_spec, spec_from_dict
from .experiment import (
    ExperimentResult, SummaryRow, grid_search, rank_cells, run_experiment, summarize,
)

__all__ = [
    "DEFAULT_GRID", "ExperimentResult", "ExperimentSpec", "SummaryRow", "analyze_covariance",
    "analyze_diversity", "clamp_study", "grid_search", "group_indicators", "knn_mean_distances",
    "load_spec", "rank_cells", "rr_linkage_groups", "run_experiment", "spec_from_dict", "summarize",
]
