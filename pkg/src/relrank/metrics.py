"""Ranking and calibration metrics: exact AUC, per-session discounted gains
for bookings and for reliability, and reliability binning.

The discounted-gain pair shares one discount, ``1 / log(offset + position)``
with positions counted from 0 and offset 2.4. The booking variant credits the
position of the booked candidate; the reliability variant credits every
position by the probability the candidate would be booked without needing
support. Both are normalized per session against the best achievable ordering
so values land in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import DataError
from .sessions import SearchSession

DCG_OFFSET = 2.4


def exact_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Probability a random positive outscores a random negative, ties 1/2.

    Computed from midranks in O(n log n); equals brute-force pair counting
    exactly because midranks and pair credits are both half-integers.

    Raises:
        DataError: only one class present.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 1 or scores.shape != labels.shape:
        raise ValueError("scores and labels must be equal-length vectors")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = scores.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError(
            f"AUC undefined: {n_pos} positives and {n_neg} negatives"
        )
    ranks = rankdata(scores, method="average")
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def _discounts(n: int, log_base: float | None) -> np.ndarray:
    d = np.log(DCG_OFFSET + np.arange(n, dtype=np.float64))
    if log_base is not None:
        d /= math.log(log_base)
    return 1.0 / d


def _check_ordering(session: SearchSession, ordering: np.ndarray) -> np.ndarray:
    ordering = np.asarray(ordering, dtype=np.int64)
    n = session.n_candidates
    if sorted(ordering.tolist()) != list(range(n)):
        raise ValueError("ordering must be a permutation of the session's candidates")
    return ordering


def booking_dcg(
    session: SearchSession, ordering: np.ndarray, log_base: float | None = None
) -> float:
    """Discounted gain of the booked candidate's position; 0 without a booking.

    ``ordering[i]`` is the candidate placed at position i. ``log_base=None``
    selects the natural logarithm.
    """
    ordering = _check_ordering(session, ordering)
    if not session.has_booking:
        return 0.0
    position = int(np.nonzero(ordering == session.booked_index)[0][0])
    return float(_discounts(session.n_candidates, log_base)[position])


def reliability_dcg(
    session: SearchSession, ordering: np.ndarray, log_base: float | None = None
) -> float:
    """Sum over positions of (1 - p_cs) times the positional discount."""
    ordering = _check_ordering(session, ordering)
    gains = 1.0 - session.cs_probs[ordering]
    return float(np.dot(gains, _discounts(session.n_candidates, log_base)))


def normalized_dcg(
    session: SearchSession,
    ordering: np.ndarray,
    kind: str = "booking",
    log_base: float | None = None,
) -> float:
    """DCG of the given ordering divided by the best achievable DCG.

    The ideal ordering sorts candidates by per-item gain descending (the
    booked flag for ``kind='booking'``, 1 - p_cs for ``kind='reliability'``).

    Raises:
        DataError: the ideal value is 0 (no booking, or every p_cs is 1), in
            which case the session carries no signal for this metric.
    """
    if kind == "booking":
        if not session.has_booking:
            raise DataError("session has no booking; no achievable booking gain")
        value = booking_dcg(session, ordering, log_base)
        ideal = float(_discounts(session.n_candidates, log_base)[0])
    elif kind == "reliability":
        value = reliability_dcg(session, ordering, log_base)
        gains = np.sort(1.0 - session.cs_probs)[::-1]
        ideal = float(np.dot(gains, _discounts(session.n_candidates, log_base)))
        if ideal == 0.0:
            raise DataError("every candidate has p_cs = 1; no achievable reliability gain")
    else:
        raise ValueError(f"unknown DCG kind {kind!r}")
    return value / ideal


@dataclass(frozen=True)
class ReliabilityBin:
    center: float
    mean_predicted: float  # nan when the bin is empty
    observed_rate: float  # nan when the bin is empty
    count: int


def reliability_bins(
    probs: np.ndarray, labels: np.ndarray, n_bins: int = 10
) -> tuple[list[ReliabilityBin], float]:
    """Equal-width reliability diagram rows plus expected calibration error.

    ECE weights each occupied bin by its share of examples and sums
    |mean predicted - observed positive rate|.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if probs.size == 0:
        raise DataError("reliability binning needs at least one example")
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    if np.any((probs < 0) | (probs > 1)):
        raise DataError("probabilities must lie in [0, 1]")

    idx = np.minimum((probs * n_bins).astype(np.int64), n_bins - 1)
    total = probs.size
    bins: list[ReliabilityBin] = []
    ece = 0.0
    for b in range(n_bins):
        mask = idx == b
        count = int(mask.sum())
        center = (b + 0.5) / n_bins
        if count == 0:
            bins.append(ReliabilityBin(center, float("nan"), float("nan"), 0))
            continue
        mean_pred = float(probs[mask].mean())
        observed = float(labels[mask].mean())
        ece += (count / total) * abs(mean_pred - observed)
        bins.append(ReliabilityBin(center, mean_pred, observed, count))
    return bins, float(ece)
