"""Scorers turn raw feature columns into calibrated support-need probabilities.

``ModelScorer`` is the production path: schema transform, network forward,
Platt calibration. ``TrueRiskScorer`` exposes the simulator's ground truth,
useful as an upper-bound reference in evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibration import PlattScaler, calibrate
from .errors import ConfigError
from .features import FeatureSchema, transform_table
from .network import ModelSpec, ModelWeights, forward_batch


@dataclass
class ModelScorer:
    schema: FeatureSchema
    spec: ModelSpec
    weights: ModelWeights
    platt: PlattScaler

    def logits(self, columns: dict[str, np.ndarray]) -> np.ndarray:
        x_cont, x_cat = transform_table(self.schema, columns)
        return forward_batch(self.weights, self.spec, x_cont, x_cat)

    def probabilities(self, columns: dict[str, np.ndarray]) -> np.ndarray:
        return calibrate(self.platt, self.logits(columns))


@dataclass
class TrueRiskScorer:
    """The generator's own conditional probabilities (the Bayes reference)."""

    world: object

    def probabilities(self, columns: dict[str, np.ndarray]) -> np.ndarray:
        from .sim.world import risk_probability

        return risk_probability(self.world, columns)


def load_scorer(model_path: str, schema_path: str) -> ModelScorer:
    """Rebuild the serving path from the model and schema files."""
    from .features import load_schema
    from .network import load_model

    weights, spec, platt = load_model(model_path)
    if platt is None:
        raise ConfigError(f"model file {model_path} carries no calibration block")
    return ModelScorer(schema=load_schema(schema_path), spec=spec, weights=weights, platt=platt)
