"""Adaptive-moment optimizer over a dict of parameter arrays."""

from typing import Dict

import numpy as np

from ..config import TRAIN_CONFIG
from ..errors import InvalidInputError


class Adam:
    """
    First-order optimizer with bias-corrected moment estimates.

    Moments are created lazily per parameter name; ``step`` updates the
    arrays in place.
    """

    def __init__(
        self,
        lr: float = TRAIN_CONFIG["learning_rate"],
        beta1: float = TRAIN_CONFIG["beta1"],
        beta2: float = TRAIN_CONFIG["beta2"],
        epsilon: float = TRAIN_CONFIG["epsilon"],
    ):
        if lr < 0:
            raise InvalidInputError(f"learning rate must be >= 0, got {lr}")
        if not (0 <= beta1 < 1 and 0 <= beta2 < 1):
            raise InvalidInputError(f"Adam betas must lie in [0, 1), got {(beta1, beta2)}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        self.t = 0

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        step_size = self.lr / bc1

        for k in params:
            g = grads.get(k)
            if g is None:
                g = np.zeros_like(params[k])
            if k not in self.m:
                self.m[k] = np.zeros_like(params[k])
                self.v[k] = np.zeros_like(params[k])
            self.m[k] *= self.beta1
            self.m[k] += (1.0 - self.beta1) * g
            self.v[k] *= self.beta2
            self.v[k] += (1.0 - self.beta2) * (g * g)
            denom = np.sqrt(self.v[k] / bc2) + self.epsilon
            params[k] -= step_size * self.m[k] / denom
