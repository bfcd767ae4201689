"""Neural autoregressive distribution estimator over binary vectors.

Parameters are indexed by genotype position; ``ordering`` gives the order in
which positions are factorised.  ``W[:, j]`` feeds position ``j`` into the
hidden state of every later variable, ``V[j]`` and ``b[j]`` read position
``j``'s conditional out of the hidden state built from its predecessors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import as_bits
from ..errors import DimensionError, NumericError, ResourceError
from .da import sigmoid


def log_sigmoid(z):
    return -np.logaddexp(0.0, -z)


@dataclass
class NadeModel:
    W: np.ndarray      # (H, D)
    c: np.ndarray      # hidden bias, (H,)
    b: np.ndarray      # visible bias, (D,)
    V: np.ndarray      # (D, H)
    ordering: np.ndarray = None
    learning_rate: float = 0.05

    PARAMS = ("W", "c", "b", "V")

    def __post_init__(self):
        D = self.W.shape[1]
        if self.ordering is None:
            self.ordering = np.arange(D)
        self.ordering = np.asarray(self.ordering, dtype=np.intp)
        if sorted(self.ordering.tolist()) != list(range(D)):
            raise ValueError("ordering must be a permutation of range(D)")

    @classmethod
    def init(cls, D: int, H: int, rng: np.random.Generator, learning_rate=0.05,
             ordering=None) -> "NadeModel":
        bound = np.sqrt(6.0 / (D + H))
        return cls(
            W=rng.uniform(-bound, bound, size=(H, D)),
            c=np.zeros(H),
            b=np.zeros(D),
            V=rng.uniform(-bound, bound, size=(D, H)),
            ordering=ordering,
            learning_rate=learning_rate,
        )

    @classmethod
    def zeros(cls, D: int, H: int, **kw) -> "NadeModel":
        return cls(np.zeros((H, D)), np.zeros(H), np.zeros(D), np.zeros((D, H)), **kw)

    @property
    def dimension(self) -> int:
        return self.W.shape[1]

    @property
    def hidden_units(self) -> int:
        return self.W.shape[0]

    def params(self) -> dict[str, np.ndarray]:
        return {k: getattr(self, k) for k in self.PARAMS}

    def copy(self) -> "NadeModel":
        return NadeModel(self.W.copy(), self.c.copy(), self.b.copy(), self.V.copy(),
                         self.ordering.copy(), self.learning_rate)


def _matrix(m: NadeModel, x) -> np.ndarray:
    X = np.asarray(x, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != m.dimension:
        raise DimensionError(f"NADE expects length {m.dimension}, got {X.shape[1]}")
    return X


def _forward(m: NadeModel, X: np.ndarray):
    """Hidden states and logits for a batch, both in factorisation order.

    ``hid[n, :, i]`` is the hidden vector used for the i-th variable in the
    ordering; the pre-activations are a running sum, so the pass is O(nDH).
    """
    o = m.ordering
    Xo = X[:, o]
    Wo = m.W[:, o]
    contrib = Xo[:, None, :] * Wo[None, :, :]
    acts = np.cumsum(contrib, axis=2) - contrib + m.c[None, :, None]
    hid = sigmoid(acts)
    logits = m.b[o][None, :] + np.einsum("dh,nhd->nd", m.V[o], hid)
    return Xo, hid, logits


def nade_log_likelihood(m: NadeModel, x):
    """log P(x) under the model; vectorised over a leading batch axis."""
    single = np.asarray(x).ndim == 1
    X = _matrix(m, x)
    Xo, _, logits = _forward(m, X)
    ll = (Xo * log_sigmoid(logits) + (1 - Xo) * log_sigmoid(-logits)).sum(axis=1)
    return float(ll[0]) if single else ll


def nade_conditionals(m: NadeModel, x) -> np.ndarray:
    """P(x_i = 1 | x_<i) for every position, returned in genotype index order."""
    X = _matrix(m, x)
    _, _, logits = _forward(m, X)
    out = np.empty_like(logits)
    out[:, m.ordering] = sigmoid(logits)
    return out


def nade_nll_and_grad(m: NadeModel, batch):
    """Mean negative log-likelihood of ``batch`` and its exact gradient."""
    X = _matrix(m, batch)
    n = X.shape[0]
    o = m.ordering
    Xo, hid, logits = _forward(m, X)
    nll = -(Xo * log_sigmoid(logits) + (1 - Xo) * log_sigmoid(-logits)).sum() / n
    d_logit = (sigmoid(logits) - Xo) / n                        # (n, D)
    g_b = d_logit.sum(axis=0)
    g_V = np.einsum("nd,nhd->dh", d_logit, hid)
    d_act = d_logit[:, None, :] * m.V[o].T[None, :, :] * hid * (1 - hid)   # (n, H, D)
    g_c = d_act.sum(axis=(0, 2))
    # position k feeds every later activation: reverse exclusive cumulative sum
    later = np.cumsum(d_act[:, :, ::-1], axis=2)[:, :, ::-1] - d_act
    g_W = np.einsum("nhd,nd->hd", later, Xo)
    grads = {"W": np.empty_like(m.W), "c": g_c, "b": np.empty_like(m.b), "V": np.empty_like(m.V)}
    grads["W"][:, o] = g_W
    grads["b"][o] = g_b
    grads["V"][o] = g_V
    return nll, grads


def nade_train_minibatch(m: NadeModel, batch):
    """One SGD step on the mean NLL of ``batch``; updates ``m`` in place, returns ``(m, nll)``."""
    B = as_bits(batch)
    if B.ndim != 2 or B.shape[0] == 0:
        raise ValueError("batch must be a non-empty (n, D) matrix")
    nll, grads = nade_nll_and_grad(m, B)
    if not np.isfinite(nll):
        raise NumericError(f"non-finite NADE loss {nll}")
    for name, g in grads.items():
        getattr(m, name)[...] -= m.learning_rate * g
    for name, v in m.params().items():
        if not np.all(np.isfinite(v)):
            raise NumericError(f"non-finite values in NADE parameter {name}")
    return m, float(nll)


def nade_train(m: NadeModel, data, epochs: int, rng: np.random.Generator, batch_size: int = 20) -> float:
    data = as_bits(data)
    loss = float("nan")
    for _ in range(epochs):
        order = rng.permutation(data.shape[0])
        losses = []
        for start in range(0, len(order), batch_size):
            _, l = nade_train_minibatch(m, data[order[start:start + batch_size]])
            losses.append(l)
        loss = float(np.mean(losses))
    return loss


def nade_sample(m: NadeModel, rng: np.random.Generator, n: int = 1,
                clamp: Optional[dict[int, int]] = None) -> np.ndarray:
    """Ancestral sampling of ``n`` genotypes.

    Clamped positions take their given value instead of being drawn and
    still feed the hidden state of later variables.
    """
    clamp = dict(clamp or {})
    D = m.dimension
    for pos in clamp:
        if not 0 <= pos < D:
            raise IndexError(f"clamp position {pos} out of range [0, {D})")
    out = np.empty((n, D), dtype=np.uint8)
    acts = np.broadcast_to(m.c, (n, m.hidden_units)).copy()
    for j in m.ordering:
        if j in clamp:
            xj = np.full(n, 1 if clamp[j] else 0, dtype=np.uint8)
        else:
            p = sigmoid(m.b[j] + sigmoid(acts) @ m.V[j])
            xj = (rng.random(n) < p).astype(np.uint8)
        out[:, j] = xj
        acts += np.outer(xj, m.W[:, j])
    return out


def all_bitstrings(D: int) -> np.ndarray:
    """Every string of length D, row r holding the binary digits of r (MSB first)."""
    r = np.arange(2 ** D, dtype=np.int64)
    return ((r[:, None] >> np.arange(D - 1, -1, -1)) & 1).astype(np.uint8)


def nade_exact_distribution(m: NadeModel) -> np.ndarray:
    """P(x) for all 2^D strings, in the row order of :func:`all_bitstrings`."""
    if m.dimension > 16:
        raise ResourceError(f"exact table needs D <= 16, got {m.dimension}")
    X = all_bitstrings(m.dimension)
    probs = np.concatenate([
        np.exp(nade_log_likelihood(m, X[i:i + 4096])) for i in range(0, len(X), 4096)
    ])
    return probs
