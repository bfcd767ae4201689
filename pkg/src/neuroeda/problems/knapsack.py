"""Multi-dimensional knapsack: instance files, random generator and penalty objective.

Instance text format (whitespace separated integers)::

    N m
    v_1 ... v_N
    w_11 ... w_1N        (m rows)
    ...
    c_1 ... c_m
    [optimum]            (optional)

OR-library ``mknap2``-style files (``N m`` / values / capacities / weight
rows / optimum) are accepted through :func:`load_orlib_mknap`.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..core import as_bits
from ..errors import DimensionError, ParseError
from .base import Problem


@dataclass
class KnapsackInstance:
    values: np.ndarray
    weights: np.ndarray
    capacities: np.ndarray
    optimum: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.weights = np.atleast_2d(np.asarray(self.weights, dtype=float))
        self.capacities = np.asarray(self.capacities, dtype=float).ravel()
        m, N = self.weights.shape
        if N < 1 or m < 1:
            raise ValueError("knapsack needs at least one item and one constraint")
        if self.values.shape != (N,) or self.capacities.shape != (m,):
            raise DimensionError("values/weights/capacities shapes disagree")
        if (self.values <= 0).any():
            raise ValueError("item values must be positive")
        if (self.weights < 0).any():
            raise ValueError("weights must be non-negative")

    @property
    def n_items(self) -> int:
        return self.weights.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.weights.shape[0]


def knapsack_fitness(x, inst: KnapsackInstance):
    X = as_bits(x)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] != inst.n_items:
        raise DimensionError(f"knapsack expects {inst.n_items} items, got {X.shape[1]}")
    Xf = X.astype(float)
    load = Xf @ inst.weights.T
    violation = np.maximum(load - inst.capacities, 0.0).sum(axis=1)
    out = np.where(violation > 0, -violation, Xf @ inst.values)
    return float(out[0]) if single else out


def gen_random_knapsack(N: int, m: int, rng: np.random.Generator, seed=None) -> KnapsackInstance:
    """Values and weights uniform on the integers 10..100; capacity is half the total weight."""
    if N < 1 or m < 1:
        raise ValueError("N and m must be positive")
    values = rng.integers(10, 101, size=N)
    weights = rng.integers(10, 101, size=(m, N))
    capacities = 0.5 * weights.sum(axis=1)
    return KnapsackInstance(values, weights, capacities, None, seed)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def format_knapsack(inst: KnapsackInstance) -> str:
    lines = []
    if inst.seed is not None:
        lines.append(f"# seed {inst.seed}")
    lines.append(f"{inst.n_items} {inst.n_constraints}")
    lines.append(" ".join(_fmt(v) for v in inst.values))
    for row in inst.weights:
        lines.append(" ".join(_fmt(w) for w in row))
    lines.append(" ".join(_fmt(c) for c in inst.capacities))
    if inst.optimum is not None:
        lines.append(_fmt(inst.optimum))
    return "\n".join(lines) + "\n"


def parse_knapsack(text: str) -> KnapsackInstance:
    seed = None
    tokens: list[str] = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "seed":
                seed = int(parts[1])
            continue
        tokens.extend(line.split())
    try:
        nums = [float(t) for t in tokens]
    except ValueError as e:
        raise ParseError(f"non-numeric token in knapsack file: {e}") from None
    if len(nums) < 2:
        raise ParseError("missing 'N m' header")
    N, m = int(nums[0]), int(nums[1])
    need = 2 + N + m * N + m
    if len(nums) not in (need, need + 1):
        raise ParseError(f"expected {need} numbers for N={N}, m={m}, found {len(nums)}")
    pos = 2
    values = nums[pos:pos + N]
    pos += N
    weights = np.array(nums[pos:pos + m * N]).reshape(m, N)
    pos += m * N
    caps = nums[pos:pos + m]
    pos += m
    optimum = nums[pos] if len(nums) > pos else None
    return KnapsackInstance(values, weights, caps, optimum, seed)


def load_knapsack(path) -> KnapsackInstance:
    return parse_knapsack(Path(path).read_text())


def load_orlib_mknap(path) -> KnapsackInstance:
    """Single-instance OR-library layout: ``N m``, values, capacities, weights, optimum."""
    nums = [float(t) for t in Path(path).read_text().split()]
    N, m = int(nums[0]), int(nums[1])
    pos = 2
    values = nums[pos:pos + N]
    pos += N
    caps = nums[pos:pos + m]
    pos += m
    weights = np.array(nums[pos:pos + m * N]).reshape(m, N)
    pos += m * N
    optimum = nums[pos] if len(nums) > pos else None
    return KnapsackInstance(values, weights, caps, optimum)


class Knapsack(Problem):
    name = "knapsack"

    def __init__(self, instance: KnapsackInstance):
        super().__init__(instance.n_items)
        self.instance = instance
        self.optimum = instance.optimum

    def _evaluate(self, X):
        return knapsack_fitness(X, self.instance)

