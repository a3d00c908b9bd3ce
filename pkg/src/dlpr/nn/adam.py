"""Adam optimizer with bias-corrected first/second moment estimates."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError


class Adam:
    def __init__(
        self,
        params: list[np.ndarray],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if not 0.0 < beta1 < 1.0 or not 0.0 < beta2 < 1.0:
            raise ConfigError("adam betas must lie strictly inside (0, 1)")
        if lr <= 0:
            raise ConfigError("learning rate must be positive")
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        """Apply one in-place update; grads align 1:1 with params."""
        if len(grads) != len(self.params):
            raise ConfigError(
                f"got {len(grads)} gradients for {len(self.params)} parameters"
            )
        self.step_count += 1
        t = self.step_count
        correct1 = 1.0 - self.beta1**t
        correct2 = 1.0 - self.beta2**t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m[...] = self.beta1 * m + (1 - self.beta1) * g
            v[...] = self.beta2 * v + (1 - self.beta2) * g * g
            mhat = m / correct1
            vhat = v / correct2
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)
