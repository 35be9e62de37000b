"""Negation identification over a two-round context window.

The classifier input is always the token sequence

    assessor_prev <sep> claimant_prev <sep> current

with empty history slots filled by the <empty> marker, encoded by one
sentence encoder with a sigmoid head.
"""

from __future__ import annotations

import numpy as np

from ..neural import (
    EMPTY,
    SEP,
    MeanPoolEncoder,
    ParameterStore,
    TrainConfig,
    Vocabulary,
    sgd_step,
    sigmoid,
)
from .data import FilteringError, NegExample, text_tokens


def window_tokens(assessor_prev: str, claimant_prev: str, current: str) -> list[str]:
    """History tokens carry a slot prefix: the encoder mean-pools, so
    without it a "no" said two turns ago would be indistinguishable from a
    "no" in the current utterance."""
    if not current:
        raise FilteringError("current utterance must be non-empty")
    parts: list[str] = []
    if assessor_prev.strip():
        parts.extend(f"a:{t}" for t in text_tokens(assessor_prev))
    else:
        parts.append(EMPTY)
    parts.append(SEP)
    if claimant_prev.strip():
        parts.extend(f"c:{t}" for t in text_tokens(claimant_prev))
    else:
        parts.append(EMPTY)
    parts.append(SEP)
    parts.extend(text_tokens(current))
    return parts


class NegationClassifier:
    def __init__(self, vocab: Vocabulary, dim: int = 32, seed: int = 0):
        self.vocab = vocab
        self.dim = dim
        self.store = ParameterStore()
        rng = np.random.default_rng(seed)
        self.encoder = MeanPoolEncoder(self.store, "neg.enc", len(vocab), dim, rng)
        self.store.add("neg.head.W", rng.normal(0.0, 0.3, dim))
        self.store.add("neg.head.b", np.zeros(1))

    def forward_ids(self, ids: np.ndarray):
        h, cache = self.encoder.forward(ids)
        z = float(self.store.value("neg.head.W") @ h + self.store.value("neg.head.b")[0])
        return sigmoid(z), (cache, h)

    def backward(self, cache, dz: float) -> None:
        enc_cache, h = cache
        self.store.grad("neg.head.W")[:] += dz * h
        self.store.grad("neg.head.b")[:] += dz
        self.encoder.backward(enc_cache, dz * self.store.value("neg.head.W"))

    def classify(self, assessor_prev: str, claimant_prev: str,
                 current: str) -> tuple[float, bool]:
        ids = self.vocab.encode(window_tokens(assessor_prev, claimant_prev, current))
        prob, _ = self.forward_ids(ids)
        return float(prob), bool(prob > 0.5)

    def fit(self, examples: list[NegExample], cfg: TrainConfig) -> "NegationClassifier":
        if not examples:
            raise FilteringError("no training examples")
        windows = [window_tokens(e.assessor_prev, e.claimant_prev, e.current)
                   for e in examples]
        length = max(len(w) for w in windows)
        ids = np.zeros((len(windows), length), dtype=np.int64)
        mask = np.zeros((len(windows), length))
        for i, w in enumerate(windows):
            enc = self.vocab.encode(w)
            ids[i, : len(enc)] = enc
            mask[i, : len(enc)] = 1.0
        y = np.array([e.label for e in examples], dtype=np.float64)
        rng = np.random.default_rng(cfg.seed)
        W = self.store.value("neg.head.W")
        for _epoch in range(cfg.epochs):
            order = rng.permutation(len(examples))
            for start in range(0, len(examples), cfg.batch_size):
                batch = order[start : start + cfg.batch_size]
                h, cache = self.encoder.forward_batch(ids[batch], mask[batch])
                z = h @ W + self.store.value("neg.head.b")[0]
                p = sigmoid(z)
                dz = (p - y[batch]) / len(batch)
                self.store.grad("neg.head.W")[:] += h.T @ dz
                self.store.grad("neg.head.b")[:] += dz.sum()
                self.encoder.backward_batch(cache, np.outer(dz, W))
                sgd_step(self.store, cfg)
        return self


def train_negation_classifier(cases, cfg: TrainConfig, dim: int = 32) -> NegationClassifier:
    from .data import negation_examples

    examples = negation_examples(cases)
    vocab = Vocabulary.from_token_lists(
        [window_tokens(e.assessor_prev, e.claimant_prev, e.current) for e in examples])
    return NegationClassifier(vocab, dim=dim, seed=cfg.seed).fit(examples, cfg)


def classify_negation(model: NegationClassifier, assessor_prev: str,
                      claimant_prev: str, current: str) -> tuple[float, bool]:
    """Returns (probability, is_negative); is_negative uses strict > 0.5."""
    return model.classify(assessor_prev, claimant_prev, current)
