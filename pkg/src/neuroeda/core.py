"""Genotypes, populations, seeded streams and the shared selection operators.

Genotypes are stored as ``uint8`` numpy rows.  A :class:`Population` keeps
all members in a single ``(P, D)`` matrix next to a fitness vector, where
``nan`` marks a member that has not been evaluated yet.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, StateError

STREAM_NAMES = ("init", "selection", "corruption", "sampling", "niching", "mask", "training")


def as_bits(x) -> np.ndarray:
    """Coerce a 0/1 sequence (or string like ``"0101"``) to a ``uint8`` array."""
    if isinstance(x, Genotype):
        return x.bits
    if isinstance(x, str):
        return np.fromiter((c == "1" for c in x), dtype=np.uint8, count=len(x))
    arr = np.asarray(x)
    if arr.dtype != np.uint8:
        arr = (arr != 0).astype(np.uint8)
    return arr


def bits_to_str(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


@dataclass(frozen=True, eq=False)
class Genotype:
    bits: np.ndarray
    fitness: Optional[float] = None

    def __post_init__(self):
        b = as_bits(self.bits).copy()
        if b.ndim != 1:
            raise DimensionError("genotype bits must be one-dimensional")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    def __len__(self):
        return self.bits.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Genotype):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __str__(self):
        return bits_to_str(self.bits)


class RngStream:
    """Root seed for one trial, split into independent named generators.

    ``RngStream(7).get("sampling")`` always yields the same generator state
    regardless of which other streams were requested before it.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._streams: dict[str, np.random.Generator] = {}

    def get(self, name: str) -> np.random.Generator:
        if name not in self._streams:
            key = zlib.crc32(name.encode("utf-8"))
            ss = np.random.SeedSequence(self.seed, spawn_key=(key,))
            self._streams[name] = np.random.Generator(np.random.PCG64(ss))
        return self._streams[name]

    def __getitem__(self, name: str) -> np.random.Generator:
        return self.get(name)


@dataclass
class Population:
    bits: np.ndarray
    fitness: np.ndarray = None
    generation: int = 0

    def __post_init__(self):
        self.bits = np.ascontiguousarray(as_bits(self.bits))
        if self.bits.ndim != 2:
            raise DimensionError("population bits must be a (P, D) matrix")
        if self.fitness is None:
            self.fitness = np.full(self.bits.shape[0], np.nan)
        else:
            self.fitness = np.asarray(self.fitness, dtype=float).copy()
        if self.fitness.shape != (self.bits.shape[0],):
            raise DimensionError("fitness vector does not match population size")

    @classmethod
    def from_genotypes(cls, members: Sequence[Genotype], generation: int = 0) -> "Population":
        bits = np.stack([m.bits for m in members])
        fit = [np.nan if m.fitness is None else m.fitness for m in members]
        return cls(bits, np.array(fit, dtype=float), generation)

    @property
    def size(self) -> int:
        return self.bits.shape[0]

    @property
    def dimension(self) -> int:
        return self.bits.shape[1]

    @property
    def members(self) -> list[Genotype]:
        return [
            Genotype(b, None if np.isnan(f) else float(f))
            for b, f in zip(self.bits, self.fitness)
        ]

    def __len__(self):
        return self.size

    def take(self, idx) -> "Population":
        idx = np.asarray(idx, dtype=np.intp)
        return Population(self.bits[idx].copy(), self.fitness[idx].copy(), self.generation)

    def copy(self) -> "Population":
        return Population(self.bits.copy(), self.fitness.copy(), self.generation)

    def evaluate(self, problem) -> None:
        """Fill in fitness for every member that has none."""
        todo = np.isnan(self.fitness)
        if todo.any():
            self.fitness[todo] = problem.evaluate(self.bits[todo])

    def require_evaluated(self) -> None:
        if np.isnan(self.fitness).any():
            raise StateError("population contains unevaluated members")

    def best_index(self) -> int:
        self.require_evaluated()
        return int(np.argmax(self.fitness))


def hamming_distance(a, b) -> int:
    a, b = as_bits(a), as_bits(b)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return int(np.count_nonzero(a != b))


def hamming_to_many(x: np.ndarray, rows: np.ndarray) -> np.ndarray:
    if rows.shape[-1] != x.shape[-1]:
        raise DimensionError(f"length mismatch: {x.shape[-1]} vs {rows.shape[-1]}")
    return np.count_nonzero(rows != x, axis=-1)


def tournament_indices(fitness: np.ndarray, count: int, tournament_size: int,
                       rng: np.random.Generator) -> np.ndarray:
    if tournament_size < 1:
        raise ValueError("tournament_size must be >= 1")
    fitness = np.asarray(fitness, dtype=float)
    if fitness.size == 0:
        raise ValueError("cannot select from an empty population")
    if np.isnan(fitness).any():
        raise StateError("tournament over unevaluated members")
    draws = rng.integers(0, fitness.size, size=(count, tournament_size))
    # argmax returns the first maximum, i.e. the earliest draw wins ties
    winners = np.argmax(fitness[draws], axis=1)
    return draws[np.arange(count), winners]


def tournament_select(pop: Population, count: int, tournament_size: int,
                      rng: np.random.Generator) -> Population:
    """Pick ``count`` members, each the fittest of ``tournament_size`` draws with replacement."""
    return pop.take(tournament_indices(pop.fitness, count, tournament_size, rng))


def unique_first_indices(bits: np.ndarray) -> np.ndarray:
    """Indices of the first occurrence of each distinct row, in original order."""
    packed = np.packbits(bits, axis=1)
    view = np.ascontiguousarray(packed).view(np.dtype((np.void, packed.shape[1])))
    _, first = np.unique(view.ravel(), return_index=True)
    return np.sort(first)


def truncation_indices(pop: Population, fraction: float, unique: bool = True) -> np.ndarray:
    if not 0 < fraction <= 1:
        raise ValueError("truncation fraction must lie in (0, 1]")
    pop.require_evaluated()
    idx = unique_first_indices(pop.bits) if unique else np.arange(pop.size)
    # stable sort keeps first-occurrence order among equal fitness
    order = idx[np.argsort(-pop.fitness[idx], kind="stable")]
    keep = math.ceil(fraction * pop.size)
    return order[:keep]


def truncation_select_unique(pop: Population, fraction: float) -> Population:
    """Fittest ``ceil(fraction * P)`` distinct genotypes, sorted by descending fitness."""
    return pop.take(truncation_indices(pop, fraction, unique=True))


def rts_replace(pop: Population, candidate, fitness: float, window: int,
                rng: np.random.Generator) -> Optional[int]:
    """Restricted tournament replacement, in place.

    The candidate competes with its nearest neighbour among ``window`` members
    drawn without replacement and takes its slot only when strictly fitter.
    Returns the replaced index, or ``None`` when the population is unchanged.
    """
    if not 1 <= window <= pop.size:
        raise ValueError(f"window must lie in [1, {pop.size}]")
    if fitness is None or np.isnan(fitness):
        raise StateError("candidate must be evaluated before replacement")
    cand = as_bits(candidate)
    drawn = np.sort(rng.choice(pop.size, size=window, replace=False))
    dist = hamming_to_many(cand, pop.bits[drawn])
    nearest = int(drawn[np.argmin(dist)])
    if fitness > pop.fitness[nearest]:
        pop.bits[nearest] = cand
        pop.fitness[nearest] = fitness
        return nearest
    return None


def init_population(P: int, D: int, rng: np.random.Generator) -> Population:
    if P < 1 or D < 1:
        raise ValueError("population size and dimension must be positive")
    return Population(rng.integers(0, 2, size=(P, D), dtype=np.uint8))
