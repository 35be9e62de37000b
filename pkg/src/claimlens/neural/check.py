"""Finite-difference gradient verification.

`loss_fn(store)` must return the scalar loss and leave fresh gradients in
the store (zeroing any previous ones). The checker perturbs every
parameter coordinate in place with central differences and reports the
worst relative disagreement with the analytic gradient.
"""

from __future__ import annotations

from typing import Callable

from .store import ParameterStore


def finite_diff_check(
    loss_fn: Callable[[ParameterStore], float],
    store: ParameterStore,
    h: float = 1e-4,
) -> float:
    loss_fn(store)
    analytic = {name: store.grads[name].copy() for name in store.names()}
    max_rel = 0.0
    for name in store.names():
        flat = store.params[name].ravel()
        gflat = analytic[name].ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            lp = loss_fn(store)
            flat[i] = orig - h
            lm = loss_fn(store)
            flat[i] = orig
            numeric = (lp - lm) / (2.0 * h)
            a = gflat[i]
            rel = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            max_rel = max(max_rel, rel)
    # leave the store's gradients matching its unperturbed parameters
    loss_fn(store)
    return max_rel
