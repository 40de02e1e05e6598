"""Synthetic marketplace: population, bookings, sessions, cohort experiments."""

from .ab import CohortResult, MetricDelta, run_ab
from .bookings import (
    NO_DELAY,
    BookingTable,
    LabeledTable,
    label_with_window,
    simulate_bookings,
    time_split,
)
from .sessions import generate_sessions, position_bonus
from .world import (
    CATEGORICAL_FEATURES,
    CONTINUOUS_FEATURES,
    FEATURE_NAMES,
    RiskCoefficients,
    World,
    WorldConfig,
    generate_world,
    risk_logit,
    risk_probability,
)

__all__ = [
    "BookingTable",
    "CATEGORICAL_FEATURES",
    "CONTINUOUS_FEATURES",
    "CohortResult",
    "FEATURE_NAMES",
    "LabeledTable",
    "MetricDelta",
    "NO_DELAY",
    "RiskCoefficients",
    "World",
    "WorldConfig",
    "generate_sessions",
    "generate_world",
    "label_with_window",
    "position_bonus",
    "risk_logit",
    "risk_probability",
    "run_ab",
    "simulate_bookings",
    "time_split",
]
