"""Benchmark problems and a small registry used by the harness."""
from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from .base import MaskedProblem, Problem, apply_mask
from .functions import (
    HIFF, MaxOnes, RoyalRoad, RoyalRoadLinkages, RoyalRoadSpec, RrLinkSpec,
    hiff, hiff_optimum, royal_road, rr_linkages,
)
from .knapsack import (
    Knapsack, KnapsackInstance, format_knapsack, gen_random_knapsack,
    knapsack_fitness, load_knapsack, load_orlib_mknap, parse_knapsack,
)
from .maxsat import (
    CnfFormula, MaxSat, bundled_instance, load_dimacs, maxsat, parse_dimacs,
    serialize_dimacs,
)

# problems whose optimum is a fixed bit pattern get a random XOR mask for the neural optimizers
MASKABLE = {"hiff", "royal_road", "rr_linkages"}

WEING8_ENV = "NEUROEDA_WEING8"


def weing8_path() -> Path:
    """Location of the Weing8 instance: ``$NEUROEDA_WEING8`` or the bundled data file."""
    env = os.environ.get(WEING8_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("neuroeda.problems") / "data" / "weing8.txt"))


def load_weing8() -> KnapsackInstance:
    path = weing8_path()
    if not path.exists():
        raise FileNotFoundError(
            f"Weing8 instance not found at {path}; place the OR-library data there "
            f"in the knapsack text format or point {WEING8_ENV} at it"
        )
    inst = load_knapsack(path)
    if inst.optimum is None:
        inst.optimum = 624319.0
    return inst


def make_problem(problem_id: str, params: dict | None = None, base_dir=None) -> Problem:
    """Build a problem from its id and parameter mapping (as found in experiment files)."""
    params = dict(params or {})
    base = Path(base_dir) if base_dir is not None else Path.cwd()

    def resolve(p):
        p = Path(p)
        return p if p.is_absolute() else base / p

    try:
        if problem_id == "hiff":
            return HIFF(int(params.get("length", 128)))
        if problem_id == "royal_road":
            return RoyalRoad(int(params.get("length", 128)), int(params.get("partition_size", 8)))
        if problem_id == "rr_linkages":
            return RoyalRoadLinkages(int(params.get("k", 4)), int(params.get("n", 4)))
        if problem_id == "maxones":
            return MaxOnes(int(params.get("length", 20)))
        if problem_id == "maxsat":
            if "instance" in params:
                formula = bundled_instance(params["instance"])
            elif "path" in params:
                formula = load_dimacs(resolve(params["path"]))
            else:
                raise ConfigError("maxsat needs 'instance' or 'path'")
            return MaxSat(formula, params.get("optimum"))
        if problem_id == "knapsack":
            if params.get("instance") == "weing8":
                return Knapsack(load_weing8())
            if "path" not in params:
                raise ConfigError("knapsack needs 'path' or instance: weing8")
            inst = load_knapsack(resolve(params["path"]))
            if "optimum" in params:
                inst.optimum = float(params["optimum"])
            return Knapsack(inst)
        if problem_id == "random_knapsack":
            seed = int(params.get("seed", 0))
            rng = np.random.default_rng(seed)
            inst = gen_random_knapsack(int(params.get("items", 500)),
                                       int(params.get("constraints", 1)), rng, seed)
            return Knapsack(inst)
    except (OSError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"cannot load problem {problem_id!r}: {e}") from e
    raise ConfigError(f"unknown problem id {problem_id!r}")


__all__ = [
    "CnfFormula", "HIFF", "Knapsack", "KnapsackInstance", "MASKABLE", "MaskedProblem",
    "MaxOnes", "MaxSat", "Problem", "RoyalRoad", "RoyalRoadLinkages", "RoyalRoadSpec",
    "RrLinkSpec", "apply_mask", "bundled_instance", "format_knapsack", "gen_random_knapsack",
    "hiff", "hiff_optimum", "knapsack_fitness", "load_dimacs", "load_knapsack",
    "load_orlib_mknap", "load_weing8", "make_problem", "maxsat", "parse_dimacs",
    "parse_knapsack", "royal_road", "rr_linkages", "serialize_dimacs", "weing8_path",
]
