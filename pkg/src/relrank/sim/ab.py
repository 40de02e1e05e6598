"""Simulated cohort experiment over ranking-strength values.

Searchers split into disjoint seeded cohorts; each cohort runs the ranking
function with its own alpha. Reported business metrics are total bookings,
bookings that realized a support need, and host cancellations (a configured
fraction of support events), with relative deltas and two-proportion z
scores against the control cohort.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError
from ..ranking import RankingConfig
from .sessions import generate_sessions
from .world import World


@dataclass(frozen=True)
class MetricDelta:
    rate: float
    relative_delta: float  # (cohort - control) / control
    z: float  # two-proportion z with unpooled standard errors


@dataclass(frozen=True)
class CohortResult:
    alpha: float
    is_control: bool
    n_sessions: int
    n_bookings: int
    n_cs_bookings: int
    n_host_cancellations: int
    bookings: MetricDelta
    cs_bookings: MetricDelta
    host_cancellations: MetricDelta


def _rate_delta(count: int, n: int, control_count: int, control_n: int) -> MetricDelta:
    p = count / n
    q = control_count / control_n
    rel = (p - q) / q if q > 0 else float("nan")
    se = np.sqrt(p * (1.0 - p) / n + q * (1.0 - q) / control_n)
    if se == 0.0:
        z = 0.0 if p == q else float("inf")
    else:
        z = (p - q) / se
    return MetricDelta(rate=p, relative_delta=rel, z=float(z))


def run_ab(
    world: World,
    scorer,
    alphas,
    control_alpha: float = 0.0,
    n_sessions: int = 50_000,
    penalty_form: str = "log_one_minus_p",
    p_clamp: float = 1e-6,
) -> list[CohortResult]:
    """One control cohort plus one cohort per alpha, all on disjoint seeds.

    Cohort i draws its sessions from the stream keyed (3, i), with the
    control fixed at i = 0, so adding or reordering treatment alphas never
    changes any cohort's population.

    Raises:
        DataError: the control cohort produced zero bookings.
    """
    cohort_alphas = [float(control_alpha)] + [float(a) for a in alphas]
    counts = []
    for i, alpha in enumerate(cohort_alphas):
        config = RankingConfig(alpha=alpha, penalty_form=penalty_form, p_clamp=p_clamp)
        sessions = generate_sessions(world, scorer, config, n_sessions, rng_key=(3, i))
        counts.append(
            (
                int((sessions.booked_pos >= 0).sum()),
                int(sessions.cs_realized.sum()),
                int(sessions.host_cancelled.sum()),
            )
        )

    control_bookings, control_cs, control_cancel = counts[0]
    if control_bookings == 0:
        raise DataError("control cohort produced zero bookings")

    results = []
    for i, (alpha, (bookings, cs, cancel)) in enumerate(zip(cohort_alphas, counts)):
        results.append(
            CohortResult(
                alpha=alpha,
                is_control=i == 0,
                n_sessions=n_sessions,
                n_bookings=bookings,
                n_cs_bookings=cs,
                n_host_cancellations=cancel,
                bookings=_rate_delta(bookings, n_sessions, control_bookings, n_sessions),
                cs_bookings=_rate_delta(cs, n_sessions, control_cs, n_sessions),
                host_cancellations=_rate_delta(cancel, n_sessions, control_cancel, n_sessions),
            )
        )
    return results
