"""Model introspection: indicator covariance, sample diversity and clamped sampling."""
from __future__ import annotations

from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..core import as_bits
from ..errors import ConfigError
from ..models import DaModel, NadeModel, da_sample, nade_sample

Predicate = Union[str, Callable[[np.ndarray], np.ndarray]]

PREDICATES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "all_ones": lambda block: np.all(block == 1, axis=1),
    "all_zeros": lambda block: np.all(block == 0, axis=1),
    "uniform": lambda block: np.all(block == block[:, :1], axis=1),
}


def _as_matrix(samples) -> np.ndarray:
    if isinstance(samples, np.ndarray) and samples.ndim == 2:
        return samples.astype(np.uint8, copy=False)
    return np.stack([as_bits(s) for s in samples])


def _predicate(p: Predicate):
    if callable(p):
        return p
    try:
        return PREDICATES[p]
    except KeyError:
        raise ConfigError(f"unknown predicate {p!r}; choose from {sorted(PREDICATES)}") from None


def group_indicators(samples, groups: Sequence[Sequence[int]],
                     predicates: Union[Predicate, Sequence[Predicate]] = "all_ones") -> np.ndarray:
    """(N, G) 0/1 matrix: does sample n satisfy the predicate on group g?"""
    X = _as_matrix(samples)
    if isinstance(predicates, str) or callable(predicates):
        predicates = [predicates] * len(groups)
    if len(predicates) != len(groups):
        raise ConfigError("need one predicate per group")
    cols = []
    for g, pred in zip(groups, predicates):
        idx = np.asarray(list(g), dtype=np.intp)
        if idx.size == 0:
            raise ConfigError("empty group")
        if idx.min() < 0 or idx.max() >= X.shape[1]:
            raise ConfigError(f"group index out of range [0, {X.shape[1]})")
        cols.append(_predicate(pred)(X[:, idx]))
    return np.stack(cols, axis=1).astype(float)


def analyze_covariance(samples, groups, predicates="all_ones") -> np.ndarray:
    """Covariance matrix (population normalisation) of the group indicators."""
    ind = group_indicators(samples, groups, predicates)
    if ind.shape[0] < 2:
        raise ConfigError("covariance needs at least two samples")
    centred = ind - ind.mean(axis=0)
    return centred.T @ centred / ind.shape[0]


def knn_mean_distances(samples, k: int = 5, chunk: int = 1024) -> np.ndarray:
    """Mean Hamming distance from each sample to its ``k`` nearest other samples."""
    X = _as_matrix(samples)
    n = X.shape[0]
    if n <= k or k < 1:
        raise ConfigError(f"need more than k={k} samples, got {n}")
    Xf = X.astype(np.float32)
    ones = Xf.sum(axis=1)
    out = np.empty(n)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        # |a xor b| = |a| + |b| - 2 a.b
        d = ones[start:stop, None] + ones[None, :] - 2.0 * (Xf[start:stop] @ Xf.T)
        d = np.rint(d)
        d[np.arange(stop - start), np.arange(start, stop)] = np.inf
        nearest = np.partition(d, k - 1, axis=1)[:, :k]
        out[start:stop] = nearest.mean(axis=1)
    return out


def analyze_diversity(samples, k: int = 5, fitness=None, bins: int = 20) -> dict:
    """Per-sample k-NN mean distances plus histogram data for distances and fitness."""
    dist = knn_mean_distances(samples, k)
    result = {"knn_mean": dist}
    counts, edges = np.histogram(dist, bins=bins)
    result["distance_hist"] = (counts, edges)
    if fitness is not None:
        fitness = np.asarray(fitness, dtype=float)
        if fitness.shape != dist.shape:
            raise ConfigError("fitness must have one value per sample")
        result["fitness"] = fitness
        result["fitness_hist"] = np.histogram(fitness, bins=bins)
    return result


def clamp_study(model, clamp: Optional[dict[int, int]], n_samples: int, rng: np.random.Generator,
                groups: Optional[Sequence[Sequence[int]]] = None, predicates="all_ones",
                mask: Optional[np.ndarray] = None) -> dict:
    """Sample with some positions fixed and report per-locus and per-group frequencies.

    ``clamp`` and the reported statistics are in problem space; when the model was
    trained on a masked problem pass its ``mask`` and the translation is done here.
    NADE clamps positions during ancestral sampling; dA clamps its (uniform random)
    inputs after corruption and pins the same loci in its outputs.
    """
    if not isinstance(model, (NadeModel, DaModel)):
        raise ConfigError(f"clamp study needs a dA or NADE model, got {type(model).__name__}")
    D = model.dimension
    clamp = {int(k): int(v) for k, v in (clamp or {}).items()}
    for pos, bit in clamp.items():
        if not 0 <= pos < D:
            raise ConfigError(f"clamp position {pos} out of range [0, {D})")
        if bit not in (0, 1):
            raise ConfigError(f"clamp value at {pos} must be 0 or 1")
    if mask is not None:
        mask = as_bits(mask)
        clamp = {pos: bit ^ int(mask[pos]) for pos, bit in clamp.items()}
    if isinstance(model, NadeModel):
        X = nade_sample(model, rng, n_samples, clamp=clamp)
    else:
        inputs = rng.integers(0, 2, size=(n_samples, D), dtype=np.uint8)
        X = da_sample(model, inputs, rng, clamp=clamp)
        # clamped loci are reported as pinned so the samples honour the clamp
        for pos, bit in clamp.items():
            X[:, pos] = bit
    if mask is not None:
        X = X ^ mask
    result = {"samples": X, "locus_means": X.mean(axis=0)}
    if groups:
        result["group_freq"] = group_indicators(X, groups, predicates).mean(axis=0)
    return result


def rr_linkage_groups(k: int, n: int) -> list[list[int]]:
    """Half-partition index sets of a Royal Road with linkages, left to right."""
    return [list(range(j * k, (j + 1) * k)) for j in range(2 * n)]
