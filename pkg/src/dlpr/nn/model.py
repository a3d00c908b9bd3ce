"""Network assembly: three conv blocks with a mid-stack pool, global
average pooling, then a three-stage dense head ending in softmax.

The canonical geometry is filters (128, 128, 64) with kernels (7, 5, 3),
dense widths (512, 128), pool size 2.  Short inputs cannot host those
kernels, so ``ModelSpec.auto`` shrinks them deterministically: largest
feasible first kernel, then second (its output must split evenly for the
pool), then third.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, ShapeError
from .layers import (
    BatchNorm,
    Conv1D,
    Dense,
    GlobalAvgPool,
    Layer,
    MaxPool,
    ReLU,
    cross_entropy_loss,
    softmax,
)

CANONICAL_FILTERS = (128, 128, 64)
CANONICAL_KERNELS = (7, 5, 3)
CANONICAL_FC = (512, 128)


@dataclass(frozen=True)
class ModelSpec:
    input_length: int
    num_classes: int
    filters: tuple[int, int, int] = CANONICAL_FILTERS
    kernels: tuple[int, int, int] = CANONICAL_KERNELS
    fc: tuple[int, int] = CANONICAL_FC
    pool: int = 2

    def __post_init__(self):
        if self.input_length < 1:
            raise ConfigError(f"input_length must be >= 1, got {self.input_length}")
        if self.num_classes < 2:
            raise ConfigError(f"need at least 2 classes, got {self.num_classes}")
        if any(f < 1 for f in self.filters) or any(w < 1 for w in self.fc):
            raise ConfigError("filter counts and dense widths must be >= 1")
        self.shape_chain()  # raises if the geometry is infeasible

    def shape_chain(self) -> list[tuple[int, int]]:
        """(maps, length) after each conv/pool stage; raises ConfigError
        when a stage would produce an empty or unpoolable tensor."""
        k1, k2, k3 = self.kernels
        l1 = self.input_length - k1 + 1
        l2 = l1 - k2 + 1
        if l1 < 1 or l2 < 1:
            raise ConfigError(
                f"kernels {self.kernels} exhaust input length {self.input_length}"
            )
        if l2 % self.pool != 0:
            raise ConfigError(
                f"pre-pool length {l2} not divisible by pool size {self.pool}"
            )
        lp = l2 // self.pool
        l3 = lp - k3 + 1
        if l3 < 1:
            raise ConfigError(f"third kernel {k3} exceeds pooled length {lp}")
        return [
            (self.filters[0], l1),
            (self.filters[1], l2),
            (self.filters[1], lp),
            (self.filters[2], l3),
        ]

    @classmethod
    def auto(
        cls,
        input_length: int,
        num_classes: int,
        filters: tuple[int, int, int] = CANONICAL_FILTERS,
        fc: tuple[int, int] = CANONICAL_FC,
        pool: int = 2,
    ) -> "ModelSpec":
        """Canonical kernels when they fit, otherwise the lexicographically
        largest feasible (k1, k2, k3) with k1 <= 7, k2 <= 5, k3 <= 3."""
        for k1 in range(min(CANONICAL_KERNELS[0], input_length), 0, -1):
            l1 = input_length - k1 + 1
            for k2 in range(min(CANONICAL_KERNELS[1], l1), 0, -1):
                l2 = l1 - k2 + 1
                if l2 < pool or l2 % pool != 0:
                    continue
                lp = l2 // pool
                for k3 in range(min(CANONICAL_KERNELS[2], lp), 0, -1):
                    return cls(
                        input_length=input_length,
                        num_classes=num_classes,
                        filters=filters,
                        kernels=(k1, k2, k3),
                        fc=fc,
                        pool=pool,
                    )
        raise ConfigError(f"no feasible kernel triple for input length {input_length}")


def toy_spec(num_classes: int = 4, input_length: int = 8) -> ModelSpec:
    """Miniature geometry for gradient checks and overfit probes: the full
    layer stack with every filter count cut to 4 and a slim dense head."""
    return ModelSpec.auto(
        input_length=input_length,
        num_classes=num_classes,
        filters=(4, 4, 4),
        fc=(64, 32),
    )


class Network:
    """Layer stack over float64 arrays.  ``forward`` maps a [B, D] batch of
    input vectors to [B, K] class probabilities; training code uses
    ``forward_logits`` with the fused cross-entropy instead."""

    def __init__(self, spec: ModelSpec, rng: np.random.Generator | None = None):
        self.spec = spec
        f1, f2, f3 = spec.filters
        k1, k2, k3 = spec.kernels
        h1, h2 = spec.fc
        self.layers: list[Layer] = [
            Conv1D(1, f1, k1, rng),
            BatchNorm(f1),
            ReLU(),
            Conv1D(f1, f2, k2, rng),
            BatchNorm(f2),
            ReLU(),
            MaxPool(spec.pool),
            Conv1D(f2, f3, k3, rng),
            BatchNorm(f3),
            ReLU(),
            GlobalAvgPool(),
            Dense(f3, h1, rng),
            BatchNorm(h1),
            ReLU(),
            Dense(h1, h2, rng),
            BatchNorm(h2),
            ReLU(),
            Dense(h2, spec.num_classes, rng),
        ]

    def params(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params()]

    def grads(self) -> list[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads()]

    def _to_3d(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 2:
            raise ShapeError(f"expected [B, D] input, got {x.shape}")
        if x.shape[1] != self.spec.input_length:
            raise ShapeError(
                f"expected input width {self.spec.input_length}, got {x.shape[1]}"
            )
        return x[:, None, :]

    def forward_logits(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        out = self._to_3d(np.asarray(x, dtype=float))
        for layer in self.layers:
            out = layer.forward(out, training=training)
        return out

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        return softmax(self.forward_logits(x, training=training))

    def backward(self, dlogits: np.ndarray) -> np.ndarray:
        dout = dlogits
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return dout[:, 0, :]

    def loss_and_grads(self, x: np.ndarray, labels: np.ndarray):
        """One training-mode pass: returns (loss, probs) and leaves fresh
        gradients in the layers."""
        logits = self.forward_logits(x, training=True)
        loss, probs, dlogits = cross_entropy_loss(logits, np.asarray(labels))
        self.backward(dlogits)
        return loss, probs

    def predict(self, x: np.ndarray, batch_size: int = 256) -> np.ndarray:
        """Inference-mode class indices; batched so results cannot depend
        on how callers partition the data (running stats only)."""
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape[0], dtype=int)
        for start in range(0, x.shape[0], batch_size):
            stop = min(start + batch_size, x.shape[0])
            probs = self.forward(x[start:stop], training=False)
            out[start:stop] = probs.argmax(axis=1)
        return out

    def predict_proba(self, x: np.ndarray, batch_size: int = 256) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        chunks = [
            self.forward(x[s : s + batch_size], training=False)
            for s in range(0, x.shape[0], batch_size)
        ]
        return np.concatenate(chunks, axis=0) if chunks else np.empty((0, self.spec.num_classes))

    def state_arrays(self) -> list[np.ndarray]:
        """Every persistent array in a fixed order: per layer, weights then
        bias for conv/dense; gamma, beta, running mean, running variance
        for batchnorm."""
        arrays: list[np.ndarray] = []
        for layer in self.layers:
            if isinstance(layer, (Conv1D, Dense)):
                arrays.extend([layer.weights, layer.bias])
            elif isinstance(layer, BatchNorm):
                arrays.extend(
                    [layer.gamma, layer.beta, layer.running_mean, layer.running_var]
                )
        return arrays

    def load_state_arrays(self, arrays: list[np.ndarray]) -> None:
        slots = self.state_arrays()
        if len(arrays) != len(slots):
            raise ShapeError(
                f"expected {len(slots)} state arrays, got {len(arrays)}"
            )
        for slot, arr in zip(slots, arrays):
            if slot.shape != arr.shape:
                raise ShapeError(f"state shape {arr.shape} != expected {slot.shape}")
            slot[...] = arr
