"""Sentence encoders over token-id sequences.

The default encoder mean-pools an embedding table and applies one tanh
dense layer; `forward`/`backward` work on a single sequence, the `_batch`
variants on padded id matrices with a mask. A small Elman recurrent
encoder is available as an alternative backend behind the same contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .store import NeuralError, ParameterStore


@dataclass(frozen=True)
class EncodedVector:
    values: np.ndarray
    role: str  # "shared" or "private"


class MeanPoolEncoder:
    def __init__(self, store: ParameterStore, prefix: str, vocab_size: int,
                 dim: int, rng: np.random.Generator, role: str = "shared"):
        self.prefix = prefix
        self.dim = dim
        self.role = role
        self.emb = store.add(f"{prefix}.emb", rng.normal(0.0, 0.1, (vocab_size, dim)))
        self.W = store.add(f"{prefix}.W", rng.normal(0.0, 0.3, (dim, dim)))
        self.b = store.add(f"{prefix}.b", np.zeros(dim))
        self._gemb = store.grad(f"{prefix}.emb")
        self._gW = store.grad(f"{prefix}.W")
        self._gb = store.grad(f"{prefix}.b")

    def forward(self, ids: np.ndarray):
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size == 0:
            raise NeuralError("cannot encode an empty sequence")
        e = self.emb[ids].mean(axis=0)
        h = np.tanh(self.W @ e + self.b)
        return h, (ids, e, h)

    def backward(self, cache, dh: np.ndarray) -> None:
        ids, e, h = cache
        dz = dh * (1.0 - h * h)
        self._gW += np.outer(dz, e)
        self._gb += dz
        de = self.W.T @ dz
        np.add.at(self._gemb, ids, de / ids.size)

    def encode(self, ids: np.ndarray) -> EncodedVector:
        h, _ = self.forward(ids)
        return EncodedVector(values=h, role=self.role)

    # padded-batch variants used by the training loops

    def forward_batch(self, ids: np.ndarray, mask: np.ndarray):
        counts = mask.sum(axis=1, keepdims=True)
        if (counts == 0).any():
            raise NeuralError("cannot encode an empty sequence")
        e = (self.emb[ids] * mask[:, :, None]).sum(axis=1) / counts
        h = np.tanh(e @ self.W.T + self.b)
        return h, (ids, mask, counts, e, h)

    def backward_batch(self, cache, dh: np.ndarray) -> None:
        ids, mask, counts, e, h = cache
        dz = dh * (1.0 - h * h)
        self._gW += dz.T @ e
        self._gb += dz.sum(axis=0)
        de = dz @ self.W
        contrib = (de[:, None, :] * mask[:, :, None]) / counts[:, :, None]
        np.add.at(self._gemb, ids.ravel(), contrib.reshape(-1, self.dim))


class RecurrentEncoder:
    """Elman recurrence h_t = tanh(Wx e_t + Wh h_{t-1} + b); output h_T."""

    def __init__(self, store: ParameterStore, prefix: str, vocab_size: int,
                 dim: int, rng: np.random.Generator, role: str = "shared"):
        self.prefix = prefix
        self.dim = dim
        self.role = role
        self.emb = store.add(f"{prefix}.emb", rng.normal(0.0, 0.1, (vocab_size, dim)))
        self.Wx = store.add(f"{prefix}.Wx", rng.normal(0.0, 0.3, (dim, dim)))
        self.Wh = store.add(f"{prefix}.Wh", rng.normal(0.0, 0.3, (dim, dim)))
        self.b = store.add(f"{prefix}.b", np.zeros(dim))
        self._gemb = store.grad(f"{prefix}.emb")
        self._gWx = store.grad(f"{prefix}.Wx")
        self._gWh = store.grad(f"{prefix}.Wh")
        self._gb = store.grad(f"{prefix}.b")

    def forward(self, ids: np.ndarray):
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size == 0:
            raise NeuralError("cannot encode an empty sequence")
        hs = [np.zeros(self.dim)]
        for tid in ids:
            hs.append(np.tanh(self.Wx @ self.emb[tid] + self.Wh @ hs[-1] + self.b))
        return hs[-1], (ids, hs)

    def backward(self, cache, dh: np.ndarray) -> None:
        ids, hs = cache
        d = dh
        for t in range(len(ids) - 1, -1, -1):
            h = hs[t + 1]
            dz = d * (1.0 - h * h)
            self._gWx += np.outer(dz, self.emb[ids[t]])
            self._gWh += np.outer(dz, hs[t])
            self._gb += dz
            self._gemb[ids[t]] += self.Wx.T @ dz
            d = self.Wh.T @ dz

    def encode(self, ids: np.ndarray) -> EncodedVector:
        h, _ = self.forward(ids)
        return EncodedVector(values=h, role=self.role)
