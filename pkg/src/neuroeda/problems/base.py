from __future__ import annotations

from typing import Optional

import numpy as np

from ..core import as_bits
from ..errors import DimensionError


class Problem:
    """Maximisation objective over fixed-length bit strings.

    Subclasses implement ``_evaluate`` on a ``(n, D)`` uint8 matrix and
    return a float vector.  :meth:`evaluate` accepts a single genotype as
    well and returns a scalar in that case.
    """

    name = "problem"
    optimum: Optional[float] = None

    def __init__(self, dimension: int):
        self.dimension = int(dimension)

    def _evaluate(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, x):
        X = as_bits(x)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.dimension:
            raise DimensionError(
                f"{self.name} expects length {self.dimension}, got {X.shape[-1]}"
            )
        out = np.asarray(self._evaluate(X), dtype=float)
        return float(out[0]) if single else out

    __call__ = evaluate

    def is_optimal(self, fitness: float) -> bool:
        return self.optimum is not None and fitness >= self.optimum - 1e-9

    def __repr__(self):
        return f"{type(self).__name__}(D={self.dimension})"


class MaskedProblem(Problem):
    """Evaluates ``inner`` on ``x XOR mask``; the mask is fixed for one trial."""

    def __init__(self, inner: Problem, mask):
        mask = as_bits(mask).copy()
        if mask.shape != (inner.dimension,):
            raise DimensionError(
                f"mask length {mask.shape[-1]} does not match dimension {inner.dimension}"
            )
        super().__init__(inner.dimension)
        mask.setflags(write=False)
        self.inner = inner
        self.mask = mask
        self.name = f"masked-{inner.name}"
        self.optimum = inner.optimum

    def _evaluate(self, X):
        return self.inner._evaluate(X ^ self.mask)

    def unmask(self, X):
        return as_bits(X) ^ self.mask


def apply_mask(p: MaskedProblem, g) -> float:
    return p.evaluate(g)
