"""Seeded multi-trial execution, summaries and grid search; every artifact is CSV."""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np
import yaml

from ..errors import ConfigError
from ..models import save_checkpoint
from ..optimizers import OptimizerConfig, RunRecord, run_trial
from .config import ExperimentSpec, cell_key

log = logging.getLogger(__name__)

RECORD_COLUMNS = ["algorithm", "trial", "seed", "generation", "evals", "best_fitness"]
SUMMARY_COLUMNS = ["algorithm", "trials", "min_best", "max_best", "mean_best", "sd_best",
                   "mean_evals", "sd_evals", "success_pct"]
GRID_COLUMNS = ["algorithm", "cell", "trials", "mean_best", "sd_best", "mean_evals",
                "success_pct", "rank"]


def fmt(v) -> str:
    """Stable text for CSV cells: integers verbatim, floats to 6 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if v == int(v) and abs(v) < 1e15:
            return str(int(v))
        return format(v, ".6g")
    return str(v)


def write_csv(path: Path, columns: list[str], rows: Iterable[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row[c]) for c in columns])
    return path


@dataclass
class SummaryRow:
    algorithm: str
    trials: int
    min_best: float
    max_best: float
    mean_best: float
    sd_best: float
    mean_evals: float
    sd_evals: float
    success_pct: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def summarize(label: str, records: list[RunRecord], budget: int) -> SummaryRow:
    """Population (ddof=0) statistics; a trial that never hit the optimum counts the full budget."""
    best = np.array([r.best_fitness for r in records], dtype=float)
    evals = np.array([r.evals_to_optimum if r.success else budget for r in records], dtype=float)
    return SummaryRow(
        algorithm=label,
        trials=len(records),
        min_best=float(best.min()),
        max_best=float(best.max()),
        mean_best=float(best.mean()),
        sd_best=float(best.std()),
        mean_evals=float(evals.mean()),
        sd_evals=float(evals.std()),
        success_pct=100.0 * sum(r.success for r in records) / len(records),
    )


def record_rows(label: str, trial: int, rec: RunRecord):
    for g, (e, b) in enumerate(zip(rec.evals_per_generation, rec.best_per_generation)):
        yield {"algorithm": label, "trial": trial, "seed": rec.seed, "generation": g,
               "evals": e, "best_fitness": b}


def _trial_task(args):
    cfg_dict, problem, seed, keep_model = args
    rec = run_trial(OptimizerConfig.from_dict(cfg_dict), problem, seed)
    if not keep_model:
        rec.model = None
    return rec


def run_trials(tasks: list[tuple[OptimizerConfig, object, int]], jobs: int = 1,
               keep_models: bool = False) -> list[RunRecord]:
    """Run independent trials, returning records in task order whatever the scheduling."""
    payload = [(cfg.to_dict(), prob, seed, keep_models) for cfg, prob, seed in tasks]
    if jobs <= 1 or len(payload) <= 1:
        return [_trial_task(p) for p in payload]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_trial_task, payload))


@dataclass
class ExperimentResult:
    records: dict[str, list[RunRecord]]
    summary: list[SummaryRow]
    output: Path


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> ExperimentResult:
    if not spec.algorithms:
        raise ConfigError("experiment lists no algorithms")
    problem = spec.problem()
    labels = list(spec.algorithms)
    tasks, owners = [], []
    for label in labels:
        for t in range(spec.trials):
            tasks.append((spec.algorithms[label], problem, spec.base_seed + t))
            owners.append((label, t))
    log.info("running %d trials of %s on %s", len(tasks), labels, spec.problem_id)
    results = run_trials(tasks, jobs, keep_models=spec.checkpoints)

    by_label: dict[str, list[RunRecord]] = {label: [] for label in labels}
    rows = []
    for (label, t), rec in zip(owners, results):
        by_label[label].append(rec)
        rows.extend(record_rows(label, t, rec))
        if rec.error:
            log.warning("%s trial %d: %s", label, t, rec.error)
        if spec.checkpoints and rec.model is not None:
            meta = {"algorithm": label, "trial": t, "seed": rec.seed,
                    "problem": spec.problem_id, "problem_params": spec.problem_params,
                    "mask": None if rec.mask is None else rec.mask.tolist()}
            save_checkpoint(rec.model, spec.output / "models" / f"{label}_trial{t}.npz", meta)
    summary = [summarize(label, by_label[label], spec.algorithms[label].max_evals)
               for label in labels]
    write_csv(spec.output / "records.csv", RECORD_COLUMNS, rows)
    write_csv(spec.output / "summary.csv", SUMMARY_COLUMNS, (s.as_dict() for s in summary))
    return ExperimentResult(by_label, summary, spec.output)


# ---------------------------------------------------------------- grid search

@dataclass
class GridCell:
    algorithm: str
    cell: dict
    config: OptimizerConfig
    mean_best: float
    sd_best: float
    mean_evals: float
    success_pct: float
    trials: int
    rank: int = 0

    def sort_key(self):
        return (-self.mean_best, self.mean_evals, cell_key(self.cell))


def rank_cells(cells: list[GridCell]) -> list[GridCell]:
    """Best mean fitness first; ties go to fewer mean evaluations, then the cell text."""
    ordered = sorted(cells, key=GridCell.sort_key)
    for i, c in enumerate(ordered, start=1):
        c.rank = i
    return ordered


def grid_search(spec: ExperimentSpec, labels: Optional[list[str]] = None,
                jobs: int = 1) -> dict[str, OptimizerConfig]:
    labels = labels or list(spec.grid)
    if not labels:
        raise ConfigError("experiment has no grid section")
    problem = spec.problem()
    plan = []
    for label in labels:
        base = spec.algorithms.get(label) or OptimizerConfig(algorithm=label)
        for cell in spec.grid_cells(label):
            plan.append((label, cell, base.replace(**cell)))
    tasks = [(cfg, problem, spec.base_seed + t) for _, _, cfg in plan for t in range(spec.grid_trials)]
    results = run_trials(tasks, jobs)

    winners, rows = {}, []
    cells_by_label: dict[str, list[GridCell]] = {label: [] for label in labels}
    for i, (label, cell, cfg) in enumerate(plan):
        recs = results[i * spec.grid_trials:(i + 1) * spec.grid_trials]
        s = summarize(label, recs, cfg.max_evals)
        cells_by_label[label].append(GridCell(label, cell, cfg, s.mean_best, s.sd_best,
                                              s.mean_evals, s.success_pct, s.trials))
    for label in labels:
        ranked = rank_cells(cells_by_label[label])
        winners[label] = ranked[0].config
        for c in ranked:
            rows.append({"algorithm": label, "cell": cell_key(c.cell), "trials": c.trials,
                         "mean_best": c.mean_best, "sd_best": c.sd_best,
                         "mean_evals": c.mean_evals, "success_pct": c.success_pct,
                         "rank": c.rank})
    write_csv(spec.output / "grid.csv", GRID_COLUMNS, rows)
    winner_doc = {label: cfg.to_dict() for label, cfg in winners.items()}
    (spec.output / "grid_winner.yaml").write_text(yaml.safe_dump(winner_doc, sort_keys=True))
    return winners
