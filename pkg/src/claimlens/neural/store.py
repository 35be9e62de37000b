"""Named parameter tensors with paired gradient buffers, plus the versioned
text serialization used for trained models.

Arrays handed out by `add` are mutated in place by the optimizer and the
finite-difference checker; callers may keep references to them.

Serialized form (one line per parameter):

    param <name> <d0>x<d1>... <v0> <v1> ...

Values are written with 17 significant digits, which round-trips doubles
bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NeuralError(ValueError):
    pass


@dataclass
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 30
    batch_size: int = 16
    adversarial_lambda: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise NeuralError("learning_rate must be positive")
        if self.epochs <= 0 or self.batch_size <= 0:
            raise NeuralError("epochs and batch_size must be positive")
        if self.adversarial_lambda < 0:
            raise NeuralError("adversarial_lambda must be non-negative")


class ParameterStore:
    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.grads: dict[str, np.ndarray] = {}

    def add(self, name: str, value: np.ndarray) -> np.ndarray:
        if name in self.params:
            raise NeuralError(f"duplicate parameter name {name!r}")
        arr = np.asarray(value, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        self.params[name] = arr
        self.grads[name] = np.zeros_like(arr)
        return arr

    def names(self) -> list[str]:
        return list(self.params)

    def value(self, name: str) -> np.ndarray:
        return self.params[name]

    def grad(self, name: str) -> np.ndarray:
        return self.grads[name]

    def zero_grads(self) -> None:
        for g in self.grads.values():
            g.fill(0.0)

    def n_coords(self) -> int:
        return sum(p.size for p in self.params.values())

    def copy_values(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}

    def load_values(self, values: dict[str, np.ndarray]) -> None:
        """Copy values into the existing arrays (in place, shapes must match)."""
        for name, arr in values.items():
            dst = self.params[name]
            if dst.shape != arr.shape:
                raise NeuralError(f"shape mismatch for {name!r}: "
                                  f"{dst.shape} vs {arr.shape}")
            np.copyto(dst, arr)

    # -- text serialization --

    def to_lines(self) -> list[str]:
        lines = []
        for name, arr in self.params.items():
            shape = "x".join(str(d) for d in arr.shape)
            values = " ".join(format(v, ".17g") for v in arr.ravel())
            lines.append(f"param {name} {shape} {values}")
        return lines

    @classmethod
    def from_lines(cls, lines: list[str]) -> "ParameterStore":
        store = cls()
        for line in lines:
            parts = line.split(" ", 3)
            if len(parts) < 3 or parts[0] != "param":
                raise NeuralError(f"bad parameter line: {line[:60]!r}")
            _, name, shape_s = parts[:3]
            shape = tuple(int(d) for d in shape_s.split("x"))
            flat = np.fromiter((float(v) for v in parts[3].split()), dtype=np.float64) \
                if len(parts) == 4 and parts[3] else np.zeros(0)
            expected = int(np.prod(shape)) if shape else 0
            if flat.size != expected:
                raise NeuralError(f"parameter {name!r}: expected {expected} values, "
                                  f"got {flat.size}")
            store.add(name, flat.reshape(shape))
        return store
