"""Central finite-difference gradients for verifying backpropagation.

Perturbs every parameter entry one at a time, so cost scales with parameter
count; meant for small diagnostic networks, not production sizes.
"""

from __future__ import annotations

import numpy as np

from .losses import get_loss
from .network import Batch, ModelSpec, ModelWeights, forward_batch


def batch_objective(
    weights: ModelWeights,
    spec: ModelSpec,
    batch: Batch,
    loss: str = "auc_surrogate",
    pair_reduction: str = "mean_over_pairs",
) -> float:
    """The training objective (data loss + L2 penalty) via the forward pass only."""
    logits = forward_batch(weights, spec, batch.x_cont, batch.x_cat)
    loss_fn = get_loss(loss)
    if loss == "auc_surrogate":
        value, _ = loss_fn(logits, batch.labels, reduction=pair_reduction)
    else:
        value, _ = loss_fn(logits, batch.labels)
    if spec.l2_coefficient > 0.0:
        value += spec.l2_coefficient * sum(
            float(np.sum(w * w)) for w in weights.dense_w
        )
    return value


def min_preactivation_gap(weights: ModelWeights, spec: ModelSpec, batch: Batch) -> float:
    """Smallest |pre-activation| across hidden layers.

    Central differences are only a valid oracle when no perturbation can push
    a unit across the activation kink at 0; callers should require this gap
    to clear the finite-difference step by a wide margin.
    """
    from .network import _activate, _assemble_input  # internal on purpose

    a = _assemble_input(weights, spec, batch.x_cont, batch.x_cat)
    gap = np.inf
    for i in range(len(spec.hidden_layers)):
        z = a @ weights.dense_w[i] + weights.dense_b[i]
        gap = min(gap, float(np.abs(z).min()))
        a = _activate(z, spec)
    return gap


def finite_difference_grads(
    weights: ModelWeights,
    spec: ModelSpec,
    batch: Batch,
    loss: str = "auc_surrogate",
    pair_reduction: str = "mean_over_pairs",
    step: float = 1e-4,
) -> ModelWeights:
    """Central differences (f(w+h) - f(w-h)) / 2h for every parameter entry."""
    grads = weights.zeros_like()
    param_arrays = [a for _, a in weights.named_arrays()]
    grad_arrays = [a for _, a in grads.named_arrays()]
    for param, grad in zip(param_arrays, grad_arrays):
        flat_p = param.reshape(-1)
        flat_g = grad.reshape(-1)
        for i in range(flat_p.size):
            original = flat_p[i]
            flat_p[i] = original + step
            up = batch_objective(weights, spec, batch, loss, pair_reduction)
            flat_p[i] = original - step
            down = batch_objective(weights, spec, batch, loss, pair_reduction)
            flat_p[i] = original
            flat_g[i] = (up - down) / (2.0 * step)
    return grads
