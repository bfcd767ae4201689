from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..core import Population
from ..errors import ConfigError

ALGORITHMS = ("dA", "NADE", "GA", "PBIL", "BOA")
NEURAL = ("dA", "NADE")

# short names as they appear in the optimisation loop pseudocode
ALIASES = {
    "P": "population_size", "T": "train_fraction", "E": "epochs", "LR": "learning_rate",
    "H": "hidden_units", "NICHING": "niching", "W": "window", "W_niche": "window",
    "EVALS": "max_evals", "p_c": "corruption", "model_kind": "algorithm",
}


@dataclass
class OptimizerConfig:
    algorithm: str = "dA"
    population_size: int = 100
    train_fraction: float = 0.5
    epochs: int = 10
    learning_rate: float = 0.1
    hidden_units: int = 64
    niching: bool = False
    window: int = 20
    max_evals: int = 100_000
    corruption: float = 0.1
    corruption_mode: str = "replace"
    tournament_size: int = 2
    batch_size: int = 20
    # NADE: factorisation order (None = natural) and candidate budget multiplier
    ordering: Optional[list[int]] = None
    resample_factor: int = 10
    # GA
    crossover_prob: float = 0.9
    mutation_rate: Optional[float] = None
    elitism: int = 1
    # PBIL
    alpha: float = 0.1
    pbil_mutation_prob: float = 0.02
    pbil_mutation_shift: float = 0.05
    pbil_bounds: tuple[float, float] = (0.01, 0.99)
    # BOA
    max_parents: int = 2
    # None: mask HIFF / Royal Road style problems for the neural models only
    mask: Optional[bool] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if not 0 < self.train_fraction <= 1:
            raise ConfigError("train_fraction must lie in (0, 1]")
        if self.population_size < 1:
            raise ConfigError("population_size must be positive")
        if self.max_evals < self.population_size:
            raise ConfigError("max_evals must be at least population_size")
        if self.learning_rate <= 0 or self.alpha < 0:
            raise ConfigError("rates must be positive")
        if not 0 <= self.corruption <= 1:
            raise ConfigError("corruption must lie in [0, 1]")
        if self.niching and not 1 <= self.window <= self.population_size:
            raise ConfigError("niching window must lie in [1, population_size]")
        if self.tournament_size < 1 or self.epochs < 0 or self.batch_size < 1:
            raise ConfigError("tournament_size, epochs and batch_size out of range")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "OptimizerConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in d.items():
            name = ALIASES.get(key, key)
            if name not in known:
                raise ConfigError(f"unknown optimizer option {key!r}")
            kwargs[name] = value
        if "pbil_bounds" in kwargs:
            kwargs["pbil_bounds"] = tuple(kwargs["pbil_bounds"])
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["pbil_bounds"] = list(self.pbil_bounds)
        return d

    def replace(self, **changes) -> "OptimizerConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class RunRecord:
    algorithm: str
    seed: int
    config: dict
    best_per_generation: list[float] = field(default_factory=list)
    evals_per_generation: list[int] = field(default_factory=list)
    evals_used: int = 0
    success: bool = False
    evals_to_optimum: Optional[int] = None
    final_population: Optional[Population] = None
    best_genotype: Optional[np.ndarray] = None
    mask: Optional[np.ndarray] = None
    error: Optional[str] = None
    model: Any = None

    @property
    def generations(self) -> int:
        """Generations executed after initialisation."""
        return max(len(self.best_per_generation) - 1, 0)

    @property
    def best_fitness(self) -> float:
        return self.best_per_generation[-1] if self.best_per_generation else float("nan")

    def log_generation(self, evals: int, best: float) -> None:
        if self.best_per_generation:
            best = max(best, self.best_per_generation[-1])
        self.best_per_generation.append(float(best))
        self.evals_per_generation.append(int(evals))
        self.evals_used = int(evals)
