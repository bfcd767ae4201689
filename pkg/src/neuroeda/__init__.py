"""Neural-network-driven estimation of distribution algorithms for bit strings."""
from .core import (
    Genotype, Population, RngStream, hamming_distance, init_population, rts_replace,
    tournament_select, truncation_select_unique,
)
from .optimizers import OptimizerConfig, RunRecord, run_trial

__version__ = "0.1.0"
