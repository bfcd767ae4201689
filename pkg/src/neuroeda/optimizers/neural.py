"""Model-driven evolutionary loop shared by the dA and NADE optimisers."""
from __future__ import annotations

import logging

import numpy as np

from ..core import (
    Population, RngStream, init_population, rts_replace, tournament_select,
    truncation_indices,
)
from ..errors import NumericError
from ..models.da import DaModel, da_sample, da_train
from ..models.nade import NadeModel, nade_sample, nade_train
from .config import OptimizerConfig, RunRecord

log = logging.getLogger(__name__)


def _row_keys(bits: np.ndarray) -> list[bytes]:
    return [r.tobytes() for r in np.packbits(bits, axis=1)]


def nade_resample(model: NadeModel, pop: Population, count: int, rng: np.random.Generator,
                  factor: int = 10) -> np.ndarray:
    """Draw up to ``factor * count`` candidates and keep ones absent from ``pop``.

    If fewer than ``count`` novel candidates turn up, the shortfall is filled
    with the most recently drawn candidates that were not kept.
    """
    seen = set(_row_keys(pop.bits))
    kept: list[np.ndarray] = []
    rejected: list[np.ndarray] = []
    drawn = 0
    while len(kept) < count and drawn < factor * count:
        batch = nade_sample(model, rng, min(count, factor * count - drawn))
        drawn += batch.shape[0]
        for row, key in zip(batch, _row_keys(batch)):
            if key in seen:
                rejected.append(row)
            elif len(kept) < count:
                kept.append(row)
    shortfall = count - len(kept)
    if shortfall:
        kept.extend(rejected[-shortfall:])
    return np.stack(kept)


def build_model(cfg: OptimizerConfig, D: int, rng: np.random.Generator):
    if cfg.algorithm == "dA":
        return DaModel.init(D, cfg.hidden_units, rng, cfg.corruption, cfg.learning_rate,
                            cfg.corruption_mode)
    return NadeModel.init(D, cfg.hidden_units, rng, cfg.learning_rate, cfg.ordering)


def incorporate(pop: Population, samples: np.ndarray, fitness: np.ndarray,
                cfg: OptimizerConfig, rng: np.random.Generator) -> Population:
    if not cfg.niching:
        return Population(samples, fitness, pop.generation + 1)
    for row, f in zip(samples, fitness):
        rts_replace(pop, row, f, cfg.window, rng)
    pop.generation += 1
    return pop


def run_neural_eda(cfg: OptimizerConfig, problem, rng: RngStream, model=None) -> RunRecord:
    if cfg.algorithm not in ("dA", "NADE"):
        raise ValueError(f"run_neural_eda needs dA or NADE, got {cfg.algorithm}")
    P, D = cfg.population_size, problem.dimension
    rec = RunRecord(cfg.algorithm, rng.seed, cfg.to_dict())
    pop = init_population(P, D, rng["init"])
    pop.evaluate(problem)
    rec.log_generation(0, pop.fitness.max())
    if model is None:
        model = build_model(cfg, D, rng["model"])
    rec.model = model
    evals = 0
    best_bits, best_fit = pop.bits[pop.best_index()].copy(), pop.fitness.max()
    solved = problem.is_optimal(best_fit)
    if solved:
        rec.evals_to_optimum = 0
    try:
        while evals < cfg.max_evals and not solved:
            train = pop.bits[truncation_indices(pop, cfg.train_fraction)]
            if cfg.algorithm == "dA":
                da_train(model, train, cfg.epochs, rng["training"], cfg.batch_size)
                inputs = tournament_select(pop, P, cfg.tournament_size, rng["selection"])
                samples = da_sample(model, inputs.bits, rng["sampling"])
            else:
                nade_train(model, train, cfg.epochs, rng["training"], cfg.batch_size)
                samples = nade_resample(model, pop, P, rng["sampling"], cfg.resample_factor)
            fitness = problem.evaluate(samples)
            evals += P
            i = int(np.argmax(fitness))
            if fitness[i] > best_fit:
                best_fit, best_bits = fitness[i], samples[i].copy()
            pop = incorporate(pop, samples, fitness, cfg, rng["niching"])
            rec.log_generation(evals, best_fit)
            if problem.is_optimal(best_fit):
                solved = True
                rec.evals_to_optimum = evals
    except NumericError as e:
        log.warning("trial %s aborted: %s", rng.seed, e)
        rec.error = str(e)
        solved = False
    rec.success = solved
    rec.final_population = pop
    rec.best_genotype = best_bits
    return rec
