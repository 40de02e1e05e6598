"""Adam with bias correction and a reduce-on-plateau learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError
from .network import ModelWeights


@dataclass(frozen=True)
class AdamConfig:
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


class Adam:
    """Owns the first/second-moment estimates for one set of weights."""

    def __init__(self, weights: ModelWeights, config: AdamConfig = AdamConfig()):
        self.config = config
        self.m = weights.zeros_like()
        self.v = weights.zeros_like()
        self.step_count = 0

    def step(self, weights: ModelWeights, grads: ModelWeights, lr: float) -> None:
        """One in-place Adam update; increments the step counter.

        Raises:
            NumericError: any gradient entry is non-finite.
        """
        for name, g in grads.named_arrays():
            if not np.isfinite(g).all():
                raise NumericError(
                    f"non-finite gradient in {name} (max |g| over finite entries: "
                    f"{np.max(np.abs(g[np.isfinite(g)]), initial=0.0):g})"
                )
        self.step_count += 1
        b1, b2, eps = self.config.beta1, self.config.beta2, self.config.epsilon
        corr1 = 1.0 - b1**self.step_count
        corr2 = 1.0 - b2**self.step_count
        weight_arrays = [a for _, a in weights.named_arrays()]
        grad_arrays = [a for _, a in grads.named_arrays()]
        m_arrays = [a for _, a in self.m.named_arrays()]
        v_arrays = [a for _, a in self.v.named_arrays()]
        for w, g, m, v in zip(weight_arrays, grad_arrays, m_arrays, v_arrays):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            w -= lr * (m / corr1) / (np.sqrt(v / corr2) + eps)


@dataclass
class PlateauScheduler:
    """Cuts the learning rate when the monitored metric stops improving.

    The metric is higher-is-better (validation AUC). A step "improves" only
    when it beats the best seen value by more than ``min_delta``; after
    ``patience`` consecutive non-improving evals the rate is multiplied by
    ``factor`` (clamped at ``min_lr``) and the counter resets.
    """

    lr: float
    factor: float = 0.5
    patience: int = 3
    min_delta: float = 1e-4
    min_lr: float = 1e-6
    best: float = field(default=-np.inf)
    bad_evals: int = field(default=0)

    def __post_init__(self):
        if not 0.0 < self.factor < 1.0:
            raise ValueError("factor must be in (0, 1)")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")

    def update(self, metric: float) -> float:
        """Record one eval; returns the (possibly reduced) learning rate."""
        if metric > self.best + self.min_delta:
            self.best = metric
            self.bad_evals = 0
        else:
            self.bad_evals += 1
            if self.bad_evals >= self.patience:
                self.lr = max(self.lr * self.factor, self.min_lr)
                self.bad_evals = 0
        return self.lr
