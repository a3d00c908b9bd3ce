"""Finite-difference verification of every backward pass.

Analytic gradients are compared against central differences with
h = 1e-5 on float64.  Relative error for a pair (a, n) is
|a - n| / max(|a|, |n|), taken as zero when both magnitudes are below
1e-6 (pure roundoff territory).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .layers import (
    BatchNorm,
    Conv1D,
    Dense,
    GlobalAvgPool,
    MaxPool,
    ReLU,
    cross_entropy_loss,
)
from .model import Network, toy_spec

STEP = 1e-5
TINY = 1e-6


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Largest elementwise relative discrepancy, ignoring sub-roundoff pairs."""
    a = np.asarray(analytic, dtype=float).ravel()
    n = np.asarray(numeric, dtype=float).ravel()
    scale = np.maximum(np.abs(a), np.abs(n))
    err = np.where(scale < TINY, 0.0, np.abs(a - n) / np.maximum(scale, TINY))
    return float(err.max()) if err.size else 0.0


def numeric_gradient(fn, arr: np.ndarray, h: float = STEP) -> np.ndarray:
    """Central-difference gradient of scalar fn with respect to arr, varied in place."""
    grad = np.zeros_like(arr)
    flat = arr.ravel()
    gflat = grad.ravel()
    for i in range(flat.size):
        keep = flat[i]
        flat[i] = keep + h
        hi = fn()
        flat[i] = keep - h
        lo = fn()
        flat[i] = keep
        gflat[i] = (hi - lo) / (2 * h)
    return grad


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance


def _check_layer(name, layer, x, training, tol=1e-4, rng=None):
    """Project the layer output against a fixed random matrix so the whole
    mapping reduces to a scalar, then compare input and parameter grads."""
    rng = rng or np.random.default_rng(0)
    out = layer.forward(x, training=training)
    proj = rng.standard_normal(out.shape)

    def scalar():
        return float((layer.forward(x, training=training) * proj).sum())

    layer.forward(x, training=training)
    dx = layer.backward(proj)
    worst = relative_error(dx, numeric_gradient(scalar, x))
    for param, grad in zip(layer.params(), layer.grads()):
        worst = max(worst, relative_error(grad, numeric_gradient(scalar, param)))
    return CheckResult(name, worst, tol)


def check_all_layers(seed: int = 0) -> list[CheckResult]:
    """One gradient check per layer type on small random tensors."""
    rng = np.random.default_rng(seed)
    results = []

    conv = Conv1D(3, 4, 3, rng)
    results.append(_check_layer("conv1d", conv, rng.standard_normal((2, 3, 9)), False, rng=rng))

    dense = Dense(6, 5, rng)
    results.append(_check_layer("dense", dense, rng.standard_normal((4, 6)), False, rng=rng))

    bn2 = BatchNorm(5)
    results.append(_check_layer("batchnorm_2d", bn2, rng.standard_normal((6, 5)), True, rng=rng))

    bn3 = BatchNorm(3)
    results.append(_check_layer("batchnorm_3d", bn3, rng.standard_normal((4, 3, 6)), True, rng=rng))

    relu = ReLU()
    # keep points away from the kink at 0 where the derivative is undefined
    kink_free = np.concatenate([np.linspace(0.1, 1.0, 14), np.linspace(-1.0, -0.1, 14)])
    results.append(
        _check_layer("relu", relu, rng.permuted(kink_free).reshape(4, 7), False, rng=rng)
    )

    pool = MaxPool(2)
    # distinct, well-separated values so h cannot flip any argmax
    spread = rng.permuted(np.linspace(-1.0, 1.0, 48)).reshape(3, 2, 8)
    results.append(_check_layer("maxpool", pool, spread, False, rng=rng))

    gap = GlobalAvgPool()
    results.append(_check_layer("global_avg_pool", gap, rng.standard_normal((3, 4, 5)), False, rng=rng))

    results.append(check_full_model(seed))
    return results


def check_full_model(seed: int = 0, tol: float = 1e-3) -> CheckResult:
    """End-to-end check: cross-entropy loss of the miniature spec against
    numeric gradients for every parameter and the input batch."""
    rng = np.random.default_rng(seed)
    net = Network(toy_spec(), np.random.default_rng(seed + 1))
    x = rng.standard_normal((4, net.spec.input_length))
    labels = rng.integers(0, net.spec.num_classes, size=4)

    def scalar():
        logits = net.forward_logits(x, training=True)
        loss, _, _ = cross_entropy_loss(logits, labels)
        return loss

    logits = net.forward_logits(x, training=True)
    _, _, dlogits = cross_entropy_loss(logits, labels)
    dx = net.backward(dlogits)

    analytic = [g.copy() for g in net.grads()]
    worst = relative_error(dx, numeric_gradient(scalar, x))
    for param, grad in zip(net.params(), analytic):
        worst = max(worst, relative_error(grad, numeric_gradient(scalar, param)))
    return CheckResult("full_model", worst, tol)
