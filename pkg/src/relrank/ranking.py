"""The ranking combiner and the offline alpha sweep.

A candidate's final score is its base ranking score plus a reliability
penalty, ``alpha * log(1 - p)`` by default (``alpha * (1 - p)`` as the raw
alternative). Sweeping alpha over logged sessions maps out the trade-off
between keeping booked candidates on top and promoting candidates unlikely
to need support.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericError
from .metrics import DCG_OFFSET
from .sessions import SearchSession, SessionSet

PENALTY_FORMS = ("log_one_minus_p", "one_minus_p")


@dataclass(frozen=True)
class RankingConfig:
    alpha: float = 0.0
    penalty_form: str = "log_one_minus_p"
    p_clamp: float = 1e-6

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.penalty_form not in PENALTY_FORMS:
            raise ValueError(f"unknown penalty form {self.penalty_form!r}")
        if not 0.0 < self.p_clamp < 0.5:
            raise ValueError("p_clamp must be a small positive fraction")


def default_alpha_grid() -> np.ndarray:
    """16 log-spaced alphas from 1e-3 to 10."""
    return np.logspace(-3.0, 1.0, 16)


def reliability_penalty(p_cs: np.ndarray, config: RankingConfig) -> np.ndarray:
    """The additive per-candidate term, before the alpha multiplier.

    For the log form, p is clamped away from 1 so the penalty stays finite;
    p = 0 needs no clamp and contributes exactly 0.
    """
    p = np.asarray(p_cs, dtype=np.float64)
    if np.any((p < 0) | (p > 1)):
        raise DataError("p_cs must lie in [0, 1]")
    if config.penalty_form == "log_one_minus_p":
        return np.log1p(-np.minimum(p, 1.0 - config.p_clamp))
    return 1.0 - p


def combined_score(
    base: np.ndarray | float, p_cs: np.ndarray | float, config: RankingConfig
) -> np.ndarray | float:
    """base + alpha * penalty(p_cs); deterministic and vectorized."""
    scalar = np.isscalar(base) and np.isscalar(p_cs)
    base = np.asarray(base, dtype=np.float64)
    if not np.isfinite(base).all():
        raise NumericError("base score is non-finite")
    out = base + config.alpha * reliability_penalty(p_cs, config)
    return float(out) if scalar else out


def rank_session(session: SearchSession, config: RankingConfig) -> np.ndarray:
    """Candidate ordering by combined score, descending.

    Ties break by candidate id ascending so orderings reproduce exactly.
    Returns indices into the session's candidate arrays.
    """
    scores = combined_score(session.base_scores, session.cs_probs, config)
    return np.lexsort((session.candidate_ids, -scores))


@dataclass(frozen=True)
class SweepPoint:
    alpha: float
    mean_booking_ndcg: float
    mean_reliability_ndcg: float
    sessions_booking: int  # sessions with a booking (the rest carry no gain)
    sessions_reliability: int  # sessions with some p < 1


def _id_sorted(sessions: SessionSet) -> SessionSet:
    """Reorder each session's columns by ascending candidate id.

    With columns in id order, a stable descending-score argsort reproduces
    rank_session's tie-break exactly, which lets the sweep stay vectorized.
    """
    order = np.argsort(sessions.candidate_ids, axis=1, kind="stable")
    booked = sessions.booked_pos.copy()
    has = booked >= 0
    inverse = np.argsort(order, axis=1, kind="stable")
    booked[has] = inverse[np.nonzero(has)[0], booked[has]]
    return SessionSet(
        candidate_ids=np.take_along_axis(sessions.candidate_ids, order, axis=1),
        base_scores=np.take_along_axis(sessions.base_scores, order, axis=1),
        cs_probs=np.take_along_axis(sessions.cs_probs, order, axis=1),
        booked_pos=booked,
        cs_realized=sessions.cs_realized,
        host_cancelled=sessions.host_cancelled,
    )


def _as_session_set(sessions) -> SessionSet:
    if isinstance(sessions, SessionSet):
        return sessions
    sessions = list(sessions)
    if not sessions:
        raise DataError("no sessions")
    k = sessions[0].n_candidates
    if any(s.n_candidates != k for s in sessions):
        raise DataError("vectorized sweep needs a uniform candidate count")
    return SessionSet(
        candidate_ids=np.stack([s.candidate_ids for s in sessions]),
        base_scores=np.stack([s.base_scores for s in sessions]),
        cs_probs=np.stack([s.cs_probs for s in sessions]),
        booked_pos=np.array(
            [-1 if s.booked_index is None else s.booked_index for s in sessions]
        ),
    )


def sweep_alpha(
    sessions,
    alpha_grid,
    penalty_form: str = "log_one_minus_p",
    p_clamp: float = 1e-6,
) -> list[SweepPoint]:
    """Rerank every session at each alpha and average the normalized metrics.

    Sessions without a booking are excluded from the booking average;
    sessions where every candidate has p = 1 are excluded from the
    reliability average. Both exclusion counts surface in the SweepPoints.
    """
    alpha_grid = np.asarray(alpha_grid, dtype=np.float64)
    if alpha_grid.size == 0:
        raise DataError("alpha grid is empty")
    sset = _id_sorted(_as_session_set(sessions))
    n, k = sset.n_sessions, sset.n_candidates

    discounts = 1.0 / np.log(DCG_OFFSET + np.arange(k, dtype=np.float64))
    gains = 1.0 - sset.cs_probs
    ideal_reliability = np.sort(gains, axis=1)[:, ::-1] @ discounts
    has_booking = sset.booked_pos >= 0
    has_reliability = ideal_reliability > 0.0
    if not has_booking.any() and not has_reliability.any():
        raise DataError("no session carries gain for either metric")

    booked_rows = np.nonzero(has_booking)[0]
    config_probe = RankingConfig(alpha=0.0, penalty_form=penalty_form, p_clamp=p_clamp)
    penalty = reliability_penalty(sset.cs_probs, config_probe)

    points = []
    for alpha in alpha_grid:
        scores = sset.base_scores + float(alpha) * penalty
        order = np.argsort(-scores, axis=1, kind="stable")
        ranks = np.argsort(order, axis=1, kind="stable")  # candidate -> position

        booking_ndcg = (
            discounts[ranks[booked_rows, sset.booked_pos[booked_rows]]] / discounts[0]
        )
        reliability_dcg = np.take_along_axis(gains, order, axis=1) @ discounts
        reliability_ndcg = (
            reliability_dcg[has_reliability] / ideal_reliability[has_reliability]
        )
        points.append(
            SweepPoint(
                alpha=float(alpha),
                mean_booking_ndcg=float(booking_ndcg.mean()) if booked_rows.size else float("nan"),
                mean_reliability_ndcg=float(reliability_ndcg.mean())
                if reliability_ndcg.size
                else float("nan"),
                sessions_booking=int(booked_rows.size),
                sessions_reliability=int(has_reliability.sum()),
            )
        )
    return points


@dataclass(frozen=True)
class PenaltyComparison:
    """ΔDCG-for-reliability between penalty forms at matched booking levels."""

    booking_levels: np.ndarray
    log_form_reliability: np.ndarray
    raw_form_reliability: np.ndarray
    dominance_fraction: float  # share of levels where the log form is >= the raw form
    partial: bool  # True when the frontiers' booking ranges barely overlap


def compare_penalty_forms(
    sessions,
    log_grid,
    raw_grid,
    p_clamp: float = 1e-6,
    n_levels: int = 25,
) -> PenaltyComparison:
    """Sweep both penalty forms on identical sessions and compare frontiers.

    Frontiers are interpolated as reliability-vs-booking curves; the report
    samples booking levels achieved by both and the fraction where the log
    form gives at least the raw form's reliability.
    """
    log_points = sweep_alpha(sessions, log_grid, "log_one_minus_p", p_clamp)
    raw_points = sweep_alpha(sessions, raw_grid, "one_minus_p", p_clamp)

    def frontier(points):
        b = np.array([p.mean_booking_ndcg for p in points])
        r = np.array([p.mean_reliability_ndcg for p in points])
        order = np.argsort(b)
        return b[order], r[order]

    log_b, log_r = frontier(log_points)
    raw_b, raw_r = frontier(raw_points)
    lo = max(log_b.min(), raw_b.min())
    hi = min(log_b.max(), raw_b.max())
    if hi < lo:
        warnings.warn(
            "penalty-form frontiers cover disjoint booking ranges; no level is comparable",
            stacklevel=2,
        )
        empty = np.array([])
        return PenaltyComparison(empty, empty, empty, float("nan"), partial=True)
    levels = np.array([lo]) if hi == lo else np.linspace(lo, hi, n_levels)
    log_at = np.interp(levels, log_b, log_r)
    raw_at = np.interp(levels, raw_b, raw_r)
    return PenaltyComparison(
        booking_levels=levels,
        log_form_reliability=log_at,
        raw_form_reliability=raw_at,
        dominance_fraction=float(np.mean(log_at >= raw_at - 1e-12)),
        partial=False,
    )
