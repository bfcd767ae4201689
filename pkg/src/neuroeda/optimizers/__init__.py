"""Optimiser entry points and the per-trial driver."""
from __future__ import annotations

import numpy as np

from ..core import RngStream
from ..problems import MASKABLE, MaskedProblem
from .baselines import (
    BayesNet, bic_node_score, learn_network, pbil_mutate, pbil_update, run_boa, run_ga,
    run_pbil, sample_network, two_point_crossover,
)
from .config import ALGORITHMS, NEURAL, OptimizerConfig, RunRecord
from .neural import nade_resample, run_neural_eda

RUNNERS = {
    "dA": run_neural_eda,
    "NADE": run_neural_eda,
    "GA": run_ga,
    "PBIL": run_pbil,
    "BOA": run_boa,
}


def wants_mask(cfg: OptimizerConfig, problem) -> bool:
    if cfg.mask is not None:
        return bool(cfg.mask)
    return cfg.algorithm in NEURAL and problem.name in MASKABLE


def run_trial(cfg: OptimizerConfig, problem, seed: int) -> RunRecord:
    """Run one seeded trial, wrapping ``problem`` in a per-trial random mask when configured."""
    rng = RngStream(seed)
    mask = None
    if wants_mask(cfg, problem):
        mask = rng["mask"].integers(0, 2, size=problem.dimension, dtype=np.uint8)
        problem = MaskedProblem(problem, mask)
    rec = RUNNERS[cfg.algorithm](cfg, problem, rng)
    rec.mask = mask
    return rec


__all__ = [
    "ALGORITHMS", "BayesNet", "NEURAL", "OptimizerConfig", "RUNNERS", "RunRecord",
    "bic_node_score", "learn_network", "nade_resample", "pbil_mutate", "pbil_update",
    "run_boa", "run_ga", "run_neural_eda", "run_pbil", "run_trial", "sample_network",
    "two_point_crossover", "wants_mask",
]
