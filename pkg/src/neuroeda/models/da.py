"""Denoising autoencoder with Bernoulli outputs, trained by minibatch SGD."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import as_bits
from ..errors import DimensionError, NumericError

EPS = 1e-7


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class DaModel:
    W: np.ndarray          # encoder, (H, D)
    b: np.ndarray          # encoder bias, (H,)
    W_dec: np.ndarray      # decoder, (D, H)
    b_dec: np.ndarray      # decoder bias, (D,)
    corruption: float = 0.1
    learning_rate: float = 0.1
    corruption_mode: str = "replace"

    PARAMS = ("W", "b", "W_dec", "b_dec")

    @classmethod
    def init(cls, D: int, H: int, rng: np.random.Generator, corruption=0.1,
             learning_rate=0.1, corruption_mode="replace") -> "DaModel":
        bound = np.sqrt(6.0 / (D + H))
        return cls(
            W=rng.uniform(-bound, bound, size=(H, D)),
            b=np.zeros(H),
            W_dec=rng.uniform(-bound, bound, size=(D, H)),
            b_dec=np.zeros(D),
            corruption=corruption,
            learning_rate=learning_rate,
            corruption_mode=corruption_mode,
        )

    @classmethod
    def zeros(cls, D: int, H: int, **kw) -> "DaModel":
        return cls(np.zeros((H, D)), np.zeros(H), np.zeros((D, H)), np.zeros(D), **kw)

    @property
    def dimension(self) -> int:
        return self.W.shape[1]

    @property
    def hidden_units(self) -> int:
        return self.W.shape[0]

    def params(self) -> dict[str, np.ndarray]:
        return {k: getattr(self, k) for k in self.PARAMS}

    def copy(self) -> "DaModel":
        return DaModel(self.W.copy(), self.b.copy(), self.W_dec.copy(), self.b_dec.copy(),
                       self.corruption, self.learning_rate, self.corruption_mode)


def corrupt(x, p: float, rng: np.random.Generator, mode: str = "replace") -> np.ndarray:
    """Randomise each bit with probability ``p``.

    ``replace`` draws a fresh uniform bit (so a hit flips with probability
    one half); ``mask`` sets the hit to zero.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("corruption level must lie in [0, 1]")
    x = as_bits(x)
    hit = rng.random(x.shape) < p
    if mode == "replace":
        fresh = rng.integers(0, 2, size=x.shape, dtype=np.uint8)
        return np.where(hit, fresh, x).astype(np.uint8)
    if mode == "mask":
        return np.where(hit, 0, x).astype(np.uint8)
    raise ValueError(f"unknown corruption mode {mode!r}")


def _check_finite(m: DaModel):
    for name, v in m.params().items():
        if not np.all(np.isfinite(v)):
            raise NumericError(f"non-finite values in dA parameter {name}")


def da_forward(m: DaModel, x) -> np.ndarray:
    """Reconstruction probabilities ``sigmoid(W_dec sigmoid(W x + b) + b_dec)``."""
    X = np.asarray(x, dtype=float)
    if X.shape[-1] != m.dimension:
        raise DimensionError(f"dA expects length {m.dimension}, got {X.shape[-1]}")
    _check_finite(m)
    h = sigmoid(X @ m.W.T + m.b)
    return sigmoid(h @ m.W_dec.T + m.b_dec)


def da_loss_and_grad(m: DaModel, inputs, targets):
    """Cross-entropy of reconstructing ``targets`` from ``inputs``.

    The objective is the per-example sum over bits, averaged over the batch.
    Returns ``(objective, grads)`` with one gradient per parameter name.
    """
    X = np.asarray(inputs, dtype=float)
    T = np.asarray(targets, dtype=float)
    n = X.shape[0]
    h = sigmoid(X @ m.W.T + m.b)
    y = sigmoid(h @ m.W_dec.T + m.b_dec)
    yc = np.clip(y, EPS, 1 - EPS)
    objective = -np.sum(T * np.log(yc) + (1 - T) * np.log(1 - yc)) / n
    d_out = (y - T) / n
    d_hid = (d_out @ m.W_dec) * h * (1 - h)
    grads = {
        "W_dec": d_out.T @ h,
        "b_dec": d_out.sum(axis=0),
        "W": d_hid.T @ X,
        "b": d_hid.sum(axis=0),
    }
    return objective, grads


def da_train_minibatch(m: DaModel, batch, rng: np.random.Generator):
    """One SGD step on a corrupted copy of ``batch``; returns ``(m, mean loss per bit)``.

    ``m`` is updated in place.
    """
    B = as_bits(batch)
    if B.ndim != 2 or B.shape[0] == 0:
        raise ValueError("batch must be a non-empty (n, D) matrix")
    if B.shape[1] != m.dimension:
        raise DimensionError(f"dA expects length {m.dimension}, got {B.shape[1]}")
    noisy = corrupt(B, m.corruption, rng, m.corruption_mode)
    objective, grads = da_loss_and_grad(m, noisy, B)
    if not np.isfinite(objective):
        raise NumericError(f"non-finite dA loss {objective}")
    for name, g in grads.items():
        getattr(m, name)[...] -= m.learning_rate * g
    _check_finite(m)
    return m, objective / m.dimension


def da_train(m: DaModel, data, epochs: int, rng: np.random.Generator, batch_size: int = 20) -> float:
    """Run ``epochs`` shuffled passes of minibatch SGD; returns the last epoch's mean loss."""
    data = as_bits(data)
    loss = float("nan")
    for _ in range(epochs):
        order = rng.permutation(data.shape[0])
        losses = []
        for start in range(0, len(order), batch_size):
            _, l = da_train_minibatch(m, data[order[start:start + batch_size]], rng)
            losses.append(l)
        loss = float(np.mean(losses))
    return loss


def da_sample(m: DaModel, x, rng: np.random.Generator,
              clamp: Optional[dict[int, int]] = None) -> np.ndarray:
    """Corrupt the input(s), optionally pin some input bits, and draw Bernoulli outputs."""
    X = as_bits(x)
    noisy = corrupt(X, m.corruption, rng, m.corruption_mode)
    if clamp:
        idx = np.fromiter(clamp.keys(), dtype=np.intp)
        if idx.min() < 0 or idx.max() >= m.dimension:
            raise IndexError("clamp position out of range")
        noisy[..., idx] = np.fromiter(clamp.values(), dtype=np.uint8)
    y = da_forward(m, noisy)
    return (rng.random(y.shape) < y).astype(np.uint8)
