"""Bit-string benchmark functions: HIFF, Royal Road, Royal Road with Linkages, MaxOnes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import as_bits
from ..errors import DimensionError
from .base import Problem


def _as_matrix(x):
    X = as_bits(x)
    return (X[None, :], True) if X.ndim == 1 else (X, False)


def _uniform_blocks(X: np.ndarray, size: int) -> np.ndarray:
    """``(n, D // size)`` mask of blocks whose bits are all equal."""
    B = X.reshape(X.shape[0], -1, size)
    return B.min(axis=2) == B.max(axis=2)


def hiff(x):
    X, single = _as_matrix(x)
    D = X.shape[1]
    if D < 1 or D & (D - 1):
        raise DimensionError(f"HIFF length must be a power of two, got {D}")
    total = np.zeros(X.shape[0])
    size = 1
    while size <= D:
        # a block keeps a non-null value at this level iff all its bits agree
        total += size * _uniform_blocks(X, size).sum(axis=1)
        size *= 2
    return float(total[0]) if single else total


def hiff_optimum(D: int) -> float:
    return float(D * (int(np.log2(D)) + 1))


@dataclass(frozen=True)
class RoyalRoadSpec:
    length: int = 128
    partition_size: int = 8

    def __post_init__(self):
        if self.partition_size < 1 or self.length % self.partition_size:
            raise DimensionError("Royal Road length must be divisible by the partition size")


def royal_road(x, spec: RoyalRoadSpec):
    X, single = _as_matrix(x)
    if X.shape[1] != spec.length:
        raise DimensionError(f"Royal Road expects length {spec.length}, got {X.shape[1]}")
    blocks = X.reshape(X.shape[0], -1, spec.partition_size).min(axis=2)
    out = spec.partition_size * blocks.sum(axis=1).astype(float)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class RrLinkSpec:
    k: int = 4
    n: int = 4

    def __post_init__(self):
        if self.k < 1 or self.n < 2:
            raise ValueError("RR-Linkages needs k >= 1 and n >= 2")

    @property
    def length(self) -> int:
        return 2 * self.k * self.n

    def halves(self) -> list[tuple[int, int]]:
        """(start, stop) of every half-partition, left then right, partition by partition."""
        return [(j * self.k, (j + 1) * self.k) for j in range(2 * self.n)]


def rr_linkages(x, spec: RrLinkSpec):
    X, single = _as_matrix(x)
    if X.shape[1] != spec.length:
        raise DimensionError(f"RR-Linkages expects length {spec.length}, got {X.shape[1]}")
    H = X.reshape(X.shape[0], 2 * spec.n, spec.k)
    ones = H.min(axis=2) == 1
    zeros = H.max(axis=2) == 0
    left_ones, right_ones = ones[:, 0::2], ones[:, 1::2]
    left_zeros, right_zeros = zeros[:, 0::2], zeros[:, 1::2]
    local = ((left_ones & right_zeros) | (left_zeros & right_ones)).sum(axis=1)
    glob = (ones[:, 0] & ones[:, -1]) | (zeros[:, 0] & zeros[:, -1])
    out = (local + glob).astype(float)
    return float(out[0]) if single else out


class HIFF(Problem):
    name = "hiff"

    def __init__(self, length: int = 128):
        if length < 1 or length & (length - 1):
            raise DimensionError(f"HIFF length must be a power of two, got {length}")
        super().__init__(length)
        self.optimum = hiff_optimum(length)

    def _evaluate(self, X):
        return hiff(X)


class RoyalRoad(Problem):
    name = "royal_road"

    def __init__(self, length: int = 128, partition_size: int = 8):
        self.spec = RoyalRoadSpec(length, partition_size)
        super().__init__(length)
        self.optimum = float(length)

    def _evaluate(self, X):
        return royal_road(X, self.spec)


class RoyalRoadLinkages(Problem):
    name = "rr_linkages"

    def __init__(self, k: int = 4, n: int = 4):
        self.spec = RrLinkSpec(k, n)
        super().__init__(self.spec.length)
        self.optimum = float(n + 1)

    def _evaluate(self, X):
        return rr_linkages(X, self.spec)


class MaxOnes(Problem):
    name = "maxones"

    def __init__(self, length: int = 20):
        super().__init__(length)
        self.optimum = float(length)

    def _evaluate(self, X):
        return X.sum(axis=1).astype(float)
