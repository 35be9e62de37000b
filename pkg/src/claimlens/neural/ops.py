"""Losses, the gradient-reversal primitive and the SGD step. Loss helpers
return (value, gradient) pairs; nothing here owns state."""

from __future__ import annotations

import numpy as np

from .store import NeuralError, ParameterStore, TrainConfig

EPS = 1e-7


def sigmoid(z: float | np.ndarray):
    return 1.0 / (1.0 + np.exp(-z))


def bce_loss(y_hat: float, y: int) -> tuple[float, float]:
    """Two-sided binary cross-entropy with epsilon clamping. Returns
    (loss, dloss/dy_hat)."""
    if y not in (0, 1):
        raise NeuralError(f"label must be 0 or 1, got {y}")
    p = min(max(float(y_hat), EPS), 1.0 - EPS)
    loss = -(y * np.log(p) + (1 - y) * np.log(1.0 - p))
    grad = -(y / p) + (1 - y) / (1.0 - p)
    return float(loss), float(grad)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def softmax_ce(logits: np.ndarray, t: int) -> tuple[float, np.ndarray]:
    """Cross-entropy of softmax(logits) against class t. Returns
    (loss, dloss/dlogits)."""
    logits = np.asarray(logits, dtype=np.float64)
    k = logits.shape[-1]
    if k < 2:
        raise NeuralError("softmax_ce needs at least 2 classes")
    if not 0 <= t < k:
        raise NeuralError(f"class index {t} out of range for {k} classes")
    probs = softmax(logits)
    loss = -np.log(max(probs[t], 1e-300))
    grad = probs.copy()
    grad[t] -= 1.0
    return float(loss), grad


def grad_reverse(upstream: np.ndarray, lam: float) -> np.ndarray:
    """Gradient-reversal backward rule: identity forward, -lam * g backward."""
    if lam < 0:
        raise NeuralError("lambda must be non-negative")
    return -lam * np.asarray(upstream, dtype=np.float64)


def sgd_step(store: ParameterStore, config: TrainConfig) -> ParameterStore:
    """In-place p <- p - lr * grad for every parameter, then zero the grads."""
    for name in store.names():
        g = store.grads[name]
        if np.isnan(g).any():
            raise NeuralError(f"NaN gradient in parameter {name!r}")
        store.params[name] -= config.learning_rate * g
    store.zero_grads()
    return store
