"""Experiment files: one YAML document per experiment.

Schema::

    problem:
      id: hiff                 # hiff | royal_road | rr_linkages | maxones | maxsat | knapsack | random_knapsack
      params: {length: 64}     # paths are resolved relative to the experiment file
    trials: 10
    base_seed: 0
    output: runs/hiff64        # default: $NEUROEDA_OUTPUT/<file stem>, else ./runs/<file stem>
    checkpoints: false         # save each trial's final model (dA / NADE) as .npz
    algorithms:                # label -> optimizer options; ``algorithm`` defaults to the label
      dA: {P: 200, H: 64, LR: 0.1, p_c: 0.2, NICHING: true, W: 20, EVALS: 200000}
      GA: {P: 100, EVALS: 200000}
    grid:                      # only read by ``grid``: label -> option -> list of values
      dA: {P: [100, 500], LR: [0.01, 0.1]}
    grid_trials: 3
"""
from __future__ import annotations

import copy
import itertools
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from ..errors import ConfigError
from ..optimizers import OptimizerConfig
from ..optimizers.config import ALIASES
from ..problems import make_problem

OUTPUT_ENV = "NEUROEDA_OUTPUT"

# ranges used for ``grid: {label: default}``
DEFAULT_GRID = {
    "population_size": [100, 500, 1000],
    "hidden_units": [32, 64, 128],
    "corruption": [0.05, 0.25, 0.5, 0.9],
    "learning_rate": [0.01, 0.05, 0.1],
    "niching": [True, False],
    "window": [10, 50],
}
_NEURAL_ONLY = {"hidden_units", "learning_rate", "corruption"}


@dataclass
class ExperimentSpec:
    problem_id: str
    problem_params: dict = field(default_factory=dict)
    algorithms: dict[str, OptimizerConfig] = field(default_factory=dict)
    grid: dict[str, dict[str, list]] = field(default_factory=dict)
    trials: int = 10
    base_seed: int = 0
    output: Path = Path("runs/experiment")
    checkpoints: bool = False
    grid_trials: int = 3
    base_dir: Path = field(default_factory=Path.cwd)
    _problem: Any = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.trials < 1 or self.grid_trials < 1:
            raise ConfigError("trials must be at least 1")

    def problem(self):
        """Build the problem once; instance files are read here, before any trial starts."""
        if self._problem is None:
            self._problem = make_problem(self.problem_id, self.problem_params, self.base_dir)
        return self._problem

    def grid_cells(self, label: str) -> list[dict]:
        ranges = self.grid.get(label)
        if not ranges:
            raise ConfigError(f"no grid ranges for {label!r}")
        keys = sorted(ranges)
        values = [ranges[k] for k in keys]
        if any(len(v) == 0 for v in values):
            raise ConfigError(f"empty range in grid for {label!r}")
        return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def _optimizer(label: str, options: Optional[dict]) -> OptimizerConfig:
    options = dict(options or {})
    if "algorithm" not in options and "model_kind" not in options:
        options["algorithm"] = label
    return OptimizerConfig.from_dict(options)


def _grid_ranges(label: str, algorithm: str, ranges) -> dict[str, list]:
    if ranges == "default":
        ranges = {k: v for k, v in DEFAULT_GRID.items()
                  if algorithm in ("dA", "NADE") or k not in _NEURAL_ONLY}
        if algorithm != "dA":
            ranges.pop("corruption", None)
    if not isinstance(ranges, dict):
        raise ConfigError(f"grid for {label!r} must map options to lists")
    out = {}
    for key, values in ranges.items():
        if not isinstance(values, list):
            values = [values]
        out[ALIASES.get(key, key)] = values
    return out


def load_spec(path, overrides: Optional[dict] = None) -> ExperimentSpec:
    """Read an experiment file; ``overrides`` are dotted keys such as ``{"trials": 3}``
    or ``{"algorithms.dA.P": 50}`` applied on top of the file."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read experiment file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    raw = apply_overrides(raw, overrides or {})
    default_out = Path(os.environ.get(OUTPUT_ENV, "runs")) / path.stem
    return spec_from_dict(raw, base_dir=path.parent, default_output=default_out)


def apply_overrides(raw: dict, overrides: dict) -> dict:
    raw = copy.deepcopy(raw)
    for dotted, value in overrides.items():
        node = raw
        *parents, leaf = dotted.split(".")
        for key in parents:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override {dotted!r}: {key!r} is not a section")
        node[leaf] = value
    return raw


def spec_from_dict(raw: dict, base_dir=None, default_output=None) -> ExperimentSpec:
    known = {"problem", "algorithms", "grid", "trials", "base_seed", "output",
             "checkpoints", "grid_trials"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown experiment keys: {sorted(unknown)}")
    problem = raw.get("problem")
    if isinstance(problem, str):
        problem = {"id": problem}
    if not isinstance(problem, dict) or "id" not in problem:
        raise ConfigError("experiment needs a problem section with an id")
    algos = raw.get("algorithms") or {}
    if not isinstance(algos, dict):
        raise ConfigError("algorithms must map labels to option sections")
    configs = {str(label): _optimizer(str(label), opts) for label, opts in algos.items()}
    grid = {}
    for label, ranges in (raw.get("grid") or {}).items():
        algorithm = configs[label].algorithm if label in configs else str(label)
        grid[str(label)] = _grid_ranges(label, algorithm, ranges)
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    output = raw.get("output")
    if output is None:
        output = default_output or Path("runs") / "experiment"
    else:
        output = Path(output)
        if not output.is_absolute():
            output = base_dir / output
    spec = ExperimentSpec(
        problem_id=str(problem["id"]),
        problem_params=dict(problem.get("params") or {}),
        algorithms=configs,
        grid=grid,
        trials=int(raw.get("trials", 10)),
        base_seed=int(raw.get("base_seed", 0)),
        output=Path(output),
        checkpoints=bool(raw.get("checkpoints", False)),
        grid_trials=int(raw.get("grid_trials", 3)),
        base_dir=base_dir,
    )
    spec.problem()
    return spec


def cell_key(cell: dict) -> str:
    """Canonical text of a grid cell; used for the lexicographic tie-break."""
    return json.dumps(cell, sort_keys=True)
