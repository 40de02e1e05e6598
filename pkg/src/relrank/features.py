"""Deterministic raw-attribute-to-model-input transformation.

Continuous features are z-scored against statistics fitted on training rows
only; features flagged as skewed go through log1p first (so zero-valued
counts stay valid). Categorical features map through a frozen vocabulary
whose index 0 is reserved for out-of-vocabulary values.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DataError

OOV_TOKEN = "<oov>"
SCHEMA_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ContinuousFeature:
    name: str
    skewed: bool = False


@dataclass(frozen=True)
class CategoricalFeature:
    name: str
    embed_dim: int
    vocab: tuple[str, ...] | None = None  # None until fitted; index 0 is OOV

    @property
    def vocab_size(self) -> int:
        if self.vocab is None:
            raise ConfigError(f"categorical feature {self.name!r} has no fitted vocabulary")
        return len(self.vocab)


@dataclass(frozen=True)
class FeatureSchema:
    """Declared feature order plus fitted statistics and vocabularies."""

    continuous: tuple[ContinuousFeature, ...]
    categorical: tuple[CategoricalFeature, ...] = ()
    stats: dict[str, tuple[float, float]] | None = None  # name -> (mean, std)

    @property
    def fitted(self) -> bool:
        return self.stats is not None and all(c.vocab is not None for c in self.categorical)

    @property
    def continuous_dim(self) -> int:
        return len(self.continuous)

    @property
    def input_dim(self) -> int:
        return self.continuous_dim + sum(c.embed_dim for c in self.categorical)

    def feature_names(self) -> list[str]:
        return [f.name for f in self.continuous] + [c.name for c in self.categorical]


def _continuous_value(feature: ContinuousFeature, raw) -> float:
    try:
        x = float(raw)
    except (TypeError, ValueError):
        raise DataError(f"feature {feature.name!r} has non-numeric value {raw!r}") from None
    if not math.isfinite(x):
        raise DataError(f"feature {feature.name!r} has non-finite value {raw!r}")
    return math.log1p(x) if feature.skewed else x


def fit_schema(rows, skeleton: FeatureSchema) -> FeatureSchema:
    """Freeze stats and vocabularies from training rows.

    Means and population standard deviations are computed after the skew
    transform. Vocabularies collect the sorted distinct training values
    behind the reserved OOV token.

    Raises:
        DataError: fewer than 2 rows, a missing field, or a constant
            continuous feature (std would be 0).
    """
    rows = list(rows)
    if len(rows) < 2:
        raise DataError(f"schema fitting needs at least 2 rows, got {len(rows)}")

    stats: dict[str, tuple[float, float]] = {}
    for feature in skeleton.continuous:
        values = np.array([_continuous_value(feature, _field(row, feature.name)) for row in rows])
        mean = float(values.mean())
        std = float(values.std())  # population, ddof=0
        if std == 0.0:
            raise DataError(f"continuous feature {feature.name!r} is constant on the fit rows")
        stats[feature.name] = (mean, std)

    categoricals = []
    for feature in skeleton.categorical:
        seen = sorted({str(_field(row, feature.name)) for row in rows} - {OOV_TOKEN})
        categoricals.append(replace(feature, vocab=(OOV_TOKEN, *seen)))

    return FeatureSchema(
        continuous=skeleton.continuous, categorical=tuple(categoricals), stats=stats
    )


def _field(row, name: str):
    try:
        return row[name]
    except KeyError:
        raise DataError(f"row is missing declared feature {name!r}") from None


def transform(schema: FeatureSchema, row) -> tuple[np.ndarray, np.ndarray]:
    """One raw row -> (continuous vector, categorical id vector).

    Pure and stateless given a fitted schema; output order follows the
    schema's declaration order. Unseen categorical values map to id 0.
    """
    if not schema.fitted:
        raise ConfigError("schema is not fitted")
    cont = np.empty(len(schema.continuous))
    for i, feature in enumerate(schema.continuous):
        mean, std = schema.stats[feature.name]
        cont[i] = (_continuous_value(feature, _field(row, feature.name)) - mean) / std
    cat = np.empty(len(schema.categorical), dtype=np.int64)
    for j, feature in enumerate(schema.categorical):
        try:
            cat[j] = feature.vocab.index(str(_field(row, feature.name)))
        except ValueError:
            cat[j] = 0
    return cont, cat


def transform_table(
    schema: FeatureSchema, columns: dict[str, np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Columnar twin of transform; one array per feature, same semantics."""
    if not schema.fitted:
        raise ConfigError("schema is not fitted")
    n = None
    for name in schema.feature_names():
        if name not in columns:
            raise DataError(f"columns are missing declared feature {name!r}")
        n = len(columns[name]) if n is None else n

    cont = np.empty((n, len(schema.continuous)))
    for i, feature in enumerate(schema.continuous):
        x = np.asarray(columns[feature.name], dtype=np.float64)
        if not np.isfinite(x).all():
            raise DataError(f"feature {feature.name!r} has non-finite values")
        if feature.skewed:
            x = np.log1p(x)
        mean, std = schema.stats[feature.name]
        cont[:, i] = (x - mean) / std

    cat = np.zeros((n, len(schema.categorical)), dtype=np.int64)
    for j, feature in enumerate(schema.categorical):
        raw = np.asarray(columns[feature.name], dtype=str)
        # vocab[1:] is sorted by construction, so ids resolve via bisection
        known = np.array(feature.vocab[1:], dtype=str)
        pos = np.searchsorted(known, raw)
        pos_clipped = np.minimum(pos, len(known) - 1) if len(known) else pos
        hit = (pos < len(known)) & (known[pos_clipped] == raw) if len(known) else np.zeros(n, bool)
        cat[:, j] = np.where(hit, pos + 1, 0)
    return cont, cat


def schema_to_dict(schema: FeatureSchema) -> dict:
    if not schema.fitted:
        raise ConfigError("only fitted schemas are serialized")
    return {
        "format_version": SCHEMA_FORMAT_VERSION,
        "continuous": [
            {
                "name": f.name,
                "skewed": f.skewed,
                "mean": schema.stats[f.name][0],
                "std": schema.stats[f.name][1],
            }
            for f in schema.continuous
        ],
        "categorical": [
            {"name": c.name, "embed_dim": c.embed_dim, "vocab": list(c.vocab)}
            for c in schema.categorical
        ],
    }


def schema_from_dict(doc: dict) -> FeatureSchema:
    if doc.get("format_version") != SCHEMA_FORMAT_VERSION:
        raise ConfigError(f"unsupported schema format_version {doc.get('format_version')!r}")
    continuous = tuple(ContinuousFeature(f["name"], f["skewed"]) for f in doc["continuous"])
    stats = {f["name"]: (f["mean"], f["std"]) for f in doc["continuous"]}
    categorical = tuple(
        CategoricalFeature(c["name"], c["embed_dim"], tuple(c["vocab"]))
        for c in doc["categorical"]
    )
    return FeatureSchema(continuous=continuous, categorical=categorical, stats=stats)


def save_schema(path: str, schema: FeatureSchema) -> None:
    tmp = f"{path}.partial"
    with open(tmp, "w") as fh:
        json.dump(schema_to_dict(schema), fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def load_schema(path: str) -> FeatureSchema:
    with open(path) as fh:
        return schema_from_dict(json.load(fh))
