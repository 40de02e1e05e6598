"""Batch losses on logits: the pairwise AUC surrogate and cross-entropy.

Both losses return ``(value, dvalue_dlogits)`` so the network can backpropagate
without re-deriving anything here. Everything is computed in the numerically
stable softplus form; ``-log sigmoid(x)`` is ``softplus(-x)`` throughout.
"""

from __future__ import annotations

import numpy as np

from .errors import SkippableBatch

PAIR_REDUCTIONS = ("mean_over_pairs", "sum")


def sigmoid(x: np.ndarray | float) -> np.ndarray:
    """Branchwise stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softplus(x: np.ndarray | float) -> np.ndarray:
    """log(1 + exp(x)) without overflow for large |x|."""
    x = np.asarray(x, dtype=np.float64)
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def auc_surrogate_loss(
    logits: np.ndarray,
    labels: np.ndarray,
    reduction: str = "mean_over_pairs",
) -> tuple[float, np.ndarray]:
    """Pairwise ranking loss: -log sigmoid(f_pos - f_neg) over all pos/neg pairs.

    The full |pos| x |neg| difference matrix is materialized; with rare
    positives and batches in the thousands this stays small.

    Raises:
        SkippableBatch: the batch holds a single class, so no pair exists.
    """
    if reduction not in PAIR_REDUCTIONS:
        raise ValueError(f"unknown pair reduction {reduction!r}")
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    _check_batch(logits, labels)

    pos_mask = labels == 1
    n_pos = int(pos_mask.sum())
    n_neg = logits.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SkippableBatch(
            f"pairwise loss needs both classes, got {n_pos} positives and {n_neg} negatives"
        )

    diffs = logits[pos_mask][:, None] - logits[~pos_mask][None, :]
    loss = float(np.sum(softplus(-diffs)))
    # d/d(diff) of softplus(-diff) is -sigmoid(-diff)
    pair_grad = -sigmoid(-diffs)
    if reduction == "mean_over_pairs":
        scale = 1.0 / (n_pos * n_neg)
        loss *= scale
        pair_grad *= scale

    grad = np.zeros_like(logits)
    grad[pos_mask] = pair_grad.sum(axis=1)
    grad[~pos_mask] = -pair_grad.sum(axis=0)
    return loss, grad


def cross_entropy_loss(
    logits: np.ndarray,
    labels: np.ndarray,
) -> tuple[float, np.ndarray]:
    """Mean binary cross-entropy on logits, in log-sum-exp form.

    Per example the value is ``softplus(f) - y*f`` and the gradient is
    ``(sigmoid(f) - y) / n``.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    _check_batch(logits, labels)

    n = logits.size
    y = labels.astype(np.float64)
    loss = float(np.sum(softplus(logits) - y * logits)) / n
    grad = (sigmoid(logits) - y) / n
    return loss, grad


def get_loss(name: str):
    """Resolve a loss by its config name ('auc_surrogate' or 'cross_entropy')."""
    if name == "auc_surrogate":
        return auc_surrogate_loss
    if name == "cross_entropy":
        return cross_entropy_loss
    raise ValueError(f"unknown loss {name!r}")


def _check_batch(logits: np.ndarray, labels: np.ndarray) -> None:
    if logits.ndim != 1 or labels.shape != logits.shape:
        raise ValueError(
            f"logits and labels must be equal-length vectors, got {logits.shape} and {labels.shape}"
        )
    if logits.size == 0:
        raise ValueError("empty batch")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
