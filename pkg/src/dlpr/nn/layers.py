"""Dense-numeric layer kernels: forward, backward, float64 throughout.

Each layer caches what its backward pass needs during forward; backward
before forward raises StateError.  Convolutions are valid-mode, stride 1,
no padding, so every output length is input length - kernel + 1.
"""

from __future__ import annotations

import numpy as np

from ..errors import BatchTooSmall, PoolError, ShapeError, StateError


class Layer:
    """Base: parameterless, stateless apart from the forward cache."""

    def params(self) -> list[np.ndarray]:
        return []

    def grads(self) -> list[np.ndarray]:
        return []

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _cache_or_raise(self, cache):
        if cache is None:
            raise StateError(f"{type(self).__name__}.backward called before forward")
        return cache


def he_uniform(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape)


class Conv1D(Layer):
    """Valid-mode 1-D convolution: out[b,m,j] = b[m] + sum_i,t x[b,i,j+t] w[m,i,t]."""

    def __init__(self, in_channels: int, out_maps: int, kernel: int, rng=None):
        if kernel < 1:
            raise ShapeError(f"kernel must be >= 1, got {kernel}")
        self.in_channels = in_channels
        self.out_maps = out_maps
        self.kernel = kernel
        if rng is None:
            self.weights = np.zeros((out_maps, in_channels, kernel))
        else:
            self.weights = he_uniform(
                rng, (out_maps, in_channels, kernel), in_channels * kernel
            )
        self.bias = np.zeros(out_maps)
        self.dweights = np.zeros_like(self.weights)
        self.dbias = np.zeros_like(self.bias)
        self._cache = None

    def params(self):
        return [self.weights, self.bias]

    def grads(self):
        return [self.dweights, self.dbias]

    def forward(self, x, training=False):
        if x.ndim != 3 or x.shape[1] != self.in_channels:
            raise ShapeError(
                f"expected [B, {self.in_channels}, L], got {x.shape}"
            )
        if x.shape[2] < self.kernel:
            raise ShapeError(
                f"input length {x.shape[2]} < kernel {self.kernel}"
            )
        taps = np.lib.stride_tricks.sliding_window_view(x, self.kernel, axis=2)
        out = np.einsum("bclk,mck->bml", taps, self.weights, optimize=True)
        out += self.bias[None, :, None]
        self._cache = (x, taps)
        return out

    def backward(self, dout):
        x, taps = self._cache_or_raise(self._cache)
        l_out = x.shape[2] - self.kernel + 1
        if dout.shape != (x.shape[0], self.out_maps, l_out):
            raise ShapeError(f"upstream gradient shape {dout.shape} unexpected")
        self.dbias[...] = dout.sum(axis=(0, 2))
        self.dweights[...] = np.einsum("bclk,bml->mck", taps, dout, optimize=True)
        dx = np.zeros_like(x)
        for t in range(self.kernel):
            dx[:, :, t : t + l_out] += np.einsum(
                "bml,mc->bcl", dout, self.weights[:, :, t], optimize=True
            )
        return dx


class Dense(Layer):
    def __init__(self, in_features: int, out_features: int, rng=None):
        self.in_features = in_features
        self.out_features = out_features
        if rng is None:
            self.weights = np.zeros((out_features, in_features))
        else:
            self.weights = he_uniform(rng, (out_features, in_features), in_features)
        self.bias = np.zeros(out_features)
        self.dweights = np.zeros_like(self.weights)
        self.dbias = np.zeros_like(self.bias)
        self._cache = None

    def params(self):
        return [self.weights, self.bias]

    def grads(self):
        return [self.dweights, self.dbias]

    def forward(self, x, training=False):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(f"expected [B, {self.in_features}], got {x.shape}")
        self._cache = x
        return x @ self.weights.T + self.bias

    def backward(self, dout):
        x = self._cache_or_raise(self._cache)
        self.dweights[...] = dout.T @ x
        self.dbias[...] = dout.sum(axis=0)
        return dout @ self.weights


class BatchNorm(Layer):
    """Per-feature normalization; batch statistics while training,
    running statistics at inference.  Accepts [B, F] or [B, C, L]
    (features are the maps in the latter)."""

    def __init__(self, num_features: int, momentum: float = 0.9, eps: float = 1e-5):
        self.num_features = num_features
        self.momentum = momentum
        self.eps = eps
        self.gamma = np.ones(num_features)
        self.beta = np.zeros(num_features)
        self.running_mean = np.zeros(num_features)
        self.running_var = np.ones(num_features)
        self.dgamma = np.zeros_like(self.gamma)
        self.dbeta = np.zeros_like(self.beta)
        self._cache = None

    def params(self):
        return [self.gamma, self.beta]

    def grads(self):
        return [self.dgamma, self.dbeta]

    def _axes_and_shape(self, x):
        if x.ndim == 2:
            if x.shape[1] != self.num_features:
                raise ShapeError(f"expected {self.num_features} features, got {x.shape}")
            return (0,), (1, -1)
        if x.ndim == 3:
            if x.shape[1] != self.num_features:
                raise ShapeError(f"expected {self.num_features} maps, got {x.shape}")
            return (0, 2), (1, -1, 1)
        raise ShapeError(f"batchnorm input must be 2-D or 3-D, got {x.shape}")

    def forward(self, x, training=False):
        axes, bshape = self._axes_and_shape(x)
        if training:
            if x.shape[0] < 2:
                raise BatchTooSmall("batchnorm training needs batch size >= 2")
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            self.running_mean[...] = (
                self.momentum * self.running_mean + (1 - self.momentum) * mean
            )
            self.running_var[...] = (
                self.momentum * self.running_var + (1 - self.momentum) * var
            )
        else:
            mean = self.running_mean
            var = self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean.reshape(bshape)) * inv_std.reshape(bshape)
        self._cache = (xhat, inv_std, axes, bshape, training, x.shape)
        return self.gamma.reshape(bshape) * xhat + self.beta.reshape(bshape)

    def backward(self, dout):
        xhat, inv_std, axes, bshape, training, xshape = self._cache_or_raise(self._cache)
        self.dgamma[...] = (dout * xhat).sum(axis=axes)
        self.dbeta[...] = dout.sum(axis=axes)
        dxhat = dout * self.gamma.reshape(bshape)
        if not training:
            return dxhat * inv_std.reshape(bshape)
        n = np.prod([xshape[a] for a in axes])
        term = (
            n * dxhat
            - dxhat.sum(axis=axes).reshape(bshape)
            - xhat * (dxhat * xhat).sum(axis=axes).reshape(bshape)
        )
        return term * inv_std.reshape(bshape) / n


class ReLU(Layer):
    def __init__(self):
        self._cache = None

    def forward(self, x, training=False):
        self._cache = x > 0
        return np.where(self._cache, x, 0.0)

    def backward(self, dout):
        mask = self._cache_or_raise(self._cache)
        return dout * mask


class MaxPool(Layer):
    """Non-overlapping pooling along the last axis; gradient routes to the
    argmax (first position on ties).  Odd lengths are rejected, not padded."""

    def __init__(self, size: int = 2):
        self.size = size
        self._cache = None

    def forward(self, x, training=False):
        if x.ndim != 3:
            raise ShapeError(f"maxpool input must be [B, M, L], got {x.shape}")
        b, m, l = x.shape
        if l % self.size != 0:
            raise PoolError(f"length {l} not divisible by pool size {self.size}")
        groups = x.reshape(b, m, l // self.size, self.size)
        arg = groups.argmax(axis=3)
        self._cache = (arg, x.shape)
        return np.take_along_axis(groups, arg[..., None], axis=3)[..., 0]

    def backward(self, dout):
        arg, xshape = self._cache_or_raise(self._cache)
        b, m, l = xshape
        dgroups = np.zeros((b, m, l // self.size, self.size))
        np.put_along_axis(dgroups, arg[..., None], dout[..., None], axis=3)
        return dgroups.reshape(xshape)


class GlobalAvgPool(Layer):
    """[B, M, L] -> [B, M] by averaging out the spatial axis."""

    def __init__(self):
        self._cache = None

    def forward(self, x, training=False):
        if x.ndim != 3:
            raise ShapeError(f"expected [B, M, L], got {x.shape}")
        self._cache = x.shape
        return x.mean(axis=2)

    def backward(self, dout):
        b, m, l = self._cache_or_raise(self._cache)
        return np.repeat(dout[:, :, None], l, axis=2) / l


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax; rows sum to 1."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy_loss(logits: np.ndarray, labels: np.ndarray):
    """Mean negative log-likelihood plus the fused softmax gradient.

    Returns (loss, probs, dlogits); dlogits is (probs - onehot) / batch.
    """
    if logits.ndim != 2:
        raise ShapeError(f"logits must be [B, K], got {logits.shape}")
    b = logits.shape[0]
    probs = softmax(logits)
    picked = probs[np.arange(b), labels]
    # a true class at probability 0 honestly scores +inf; the training
    # loop treats any non-finite loss as a numeric abort
    with np.errstate(divide="ignore"):
        loss = float(-np.mean(np.log(picked)))
    dlogits = probs.copy()
    dlogits[np.arange(b), labels] -= 1.0
    return loss, probs, dlogits / b
