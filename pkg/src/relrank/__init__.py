"""relrank: reliability-aware search ranking.

Trains a calibrated classifier for "this booking will need customer support",
folds its probability into a search-ranking function as an additive
``alpha * log(1 - p)`` term, and evaluates the booking/reliability trade-off
on synthetic two-sided-marketplace sessions, including a simulated cohort
experiment over alpha values.
"""

__version__ = "0.1.0"

from .calibration import PlattScaler, calibrate, fit_platt
from .losses import auc_surrogate_loss, cross_entropy_loss
from .metrics import (
    booking_dcg,
    exact_auc,
    normalized_dcg,
    reliability_bins,
    reliability_dcg,
)
from .network import (
    Batch,
    EmbeddingSpec,
    ModelSpec,
    ModelWeights,
    forward,
    forward_batch,
    init_weights,
    load_model,
    multiplication_count,
    save_model,
)
from .optim import Adam, AdamConfig, PlateauScheduler
from .sessions import SearchSession, SessionSet

__all__ = [
    "Adam",
    "AdamConfig",
    "Batch",
    "EmbeddingSpec",
    "ModelSpec",
    "ModelWeights",
    "PlattScaler",
    "PlateauScheduler",
    "SearchSession",
    "SessionSet",
    "auc_surrogate_loss",
    "booking_dcg",
    "calibrate",
    "cross_entropy_loss",
    "exact_auc",
    "fit_platt",
    "forward",
    "forward_batch",
    "init_weights",
    "load_model",
    "multiplication_count",
    "normalized_dcg",
    "reliability_bins",
    "reliability_dcg",
    "save_model",
]
