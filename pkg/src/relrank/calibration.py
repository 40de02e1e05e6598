"""Platt scaling: map raw logits onto calibrated probabilities.

Fits the two-parameter logistic model p = sigmoid(w * logit + b) by Newton's
method on the Bernoulli log-likelihood. The underlying ranking is untouched
whenever w > 0, so calibrated probabilities keep the model's AUC exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .losses import sigmoid

MAX_ABS_W = 50.0
_P_FLOOR = 1e-15
_P_CEIL = 1.0 - 1e-16


@dataclass(frozen=True)
class PlattScaler:
    w: float
    b: float
    fitted_on: str = "unknown"

    def __post_init__(self):
        if not (np.isfinite(self.w) and np.isfinite(self.b)):
            raise DataError("Platt parameters must be finite")


def calibrate(scaler: PlattScaler, logits: np.ndarray | float) -> np.ndarray | float:
    """sigmoid(w * logit + b), kept strictly inside (0, 1)."""
    scalar = np.isscalar(logits)
    p = sigmoid(scaler.w * np.asarray(logits, dtype=np.float64) + scaler.b)
    p = np.clip(p, _P_FLOOR, _P_CEIL)
    return float(p) if scalar else p


def fit_platt(
    logits: np.ndarray,
    labels: np.ndarray,
    smoothing: bool = False,
    fitted_on: str = "unknown",
    max_iter: int = 100,
    tol: float = 1e-10,
) -> PlattScaler:
    """Maximum-likelihood (w, b) for labels given logits.

    ``smoothing`` switches the 0/1 targets to the classic smoothed targets
    (n_pos + 1)/(n_pos + 2) and 1/(n_neg + 2), which tames perfectly
    separable data. Without it, separable data drives |w| to the cap at
    50, which is reported as a degenerate fit.

    Raises:
        DataError: fewer than 2 examples or a single class.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if logits.ndim != 1 or logits.shape != labels.shape:
        raise DataError("logits and labels must be equal-length vectors")
    n = logits.size
    n_pos = float(labels.sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("Platt fit needs both classes")
    if n < 100:
        warnings.warn(f"fitting a Platt scaler on only {n} examples", stacklevel=2)

    if smoothing:
        hi = (n_pos + 1.0) / (n_pos + 2.0)
        lo = 1.0 / (n_neg + 2.0)
        targets = np.where(labels == 1, hi, lo)
    else:
        targets = labels
        if logits[labels == 1].min() > logits[labels == 0].max():
            warnings.warn(
                "degenerate Platt fit: classes are perfectly separable, "
                "w diverges and will stall or hit the cap",
                stacklevel=2,
            )

    w, b = 0.0, float(np.log((n_pos + 1.0) / (n_neg + 1.0)))
    for _ in range(max_iter):
        p = sigmoid(w * logits + b)
        residual = p - targets
        grad = np.array([np.dot(residual, logits), residual.sum()])
        s = np.maximum(p * (1.0 - p), 1e-12)
        h_ww = np.dot(s, logits * logits)
        h_wb = np.dot(s, logits)
        h_bb = s.sum()
        hessian = np.array([[h_ww, h_wb], [h_wb, h_bb]])
        try:
            delta = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            delta = grad / max(h_bb, 1e-12)
        w -= delta[0]
        b -= delta[1]
        if abs(w) > MAX_ABS_W:
            warnings.warn(
                "degenerate Platt fit: |w| hit the cap, data looks perfectly separable",
                stacklevel=2,
            )
            w = float(np.clip(w, -MAX_ABS_W, MAX_ABS_W))
            break
        if np.max(np.abs(delta)) < tol:
            break

    if w <= 0:
        warnings.warn(
            f"Platt fit produced non-increasing w = {w:.4g}; "
            "calibrated scores will not preserve the model's ranking",
            stacklevel=2,
        )
    return PlattScaler(w=float(w), b=float(b), fitted_on=fitted_on)
