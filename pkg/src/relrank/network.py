"""Minimal feed-forward network producing a single logit.

The input to the dense stack is the concatenation of the continuous feature
vector with one learned embedding vector per categorical feature. The output
layer is a single linear unit: the network emits logits, never probabilities.
Calibration happens downstream.

All math is float64. Weight matrices are stored row-major as (fan_in, fan_out)
so a batch forward is ``x @ w + b``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .losses import get_loss

MODEL_FORMAT_VERSION = 1

ACTIVATIONS = ("relu", "leaky_relu")


@dataclass(frozen=True)
class EmbeddingSpec:
    vocab_size: int
    embed_dim: int


@dataclass(frozen=True)
class ModelSpec:
    """Architecture description; owns the init seed for determinism.

    ``input_dim`` counts continuous features plus the summed embedding widths.
    """

    input_dim: int
    hidden_layers: tuple[int, ...]
    activation: str = "relu"
    leaky_slope: float = 0.01
    embedding_specs: tuple[EmbeddingSpec, ...] = ()
    l2_coefficient: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.input_dim < 1:
            raise ConfigError("input_dim must be positive")
        if not self.hidden_layers or any(h < 1 for h in self.hidden_layers):
            raise ConfigError("hidden_layers must be non-empty with widths >= 1")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"unknown activation {self.activation!r}")
        if self.activation == "leaky_relu" and not 0.0 < self.leaky_slope < 1.0:
            raise ConfigError("leaky_relu slope must be in (0, 1)")
        if any(e.vocab_size < 1 or e.embed_dim < 1 for e in self.embedding_specs):
            raise ConfigError("embedding specs need positive vocab_size and embed_dim")
        if self.continuous_dim < 0:
            raise ConfigError(
                "input_dim smaller than the summed embedding widths "
                f"({self.input_dim} < {self.embed_total_dim})"
            )
        if self.l2_coefficient < 0:
            raise ConfigError("l2_coefficient must be non-negative")

    @property
    def embed_total_dim(self) -> int:
        return sum(e.embed_dim for e in self.embedding_specs)

    @property
    def continuous_dim(self) -> int:
        return self.input_dim - self.embed_total_dim

    @property
    def layer_dims(self) -> tuple[int, ...]:
        """Full dims chain input -> hidden... -> 1."""
        return (self.input_dim, *self.hidden_layers, 1)


@dataclass
class ModelWeights:
    """Learned parameters matching a ModelSpec's dims chain."""

    dense_w: list[np.ndarray]
    dense_b: list[np.ndarray]
    embeddings: list[np.ndarray]
    version: int = MODEL_FORMAT_VERSION

    def named_arrays(self):
        """Yield (name, array) in a fixed order; names key serialization."""
        for i, (w, b) in enumerate(zip(self.dense_w, self.dense_b)):
            yield f"dense_{i}.weight", w
            yield f"dense_{i}.bias", b
        for j, table in enumerate(self.embeddings):
            yield f"embedding_{j}", table

    def copy(self) -> "ModelWeights":
        return ModelWeights(
            dense_w=[w.copy() for w in self.dense_w],
            dense_b=[b.copy() for b in self.dense_b],
            embeddings=[t.copy() for t in self.embeddings],
            version=self.version,
        )

    def zeros_like(self) -> "ModelWeights":
        return ModelWeights(
            dense_w=[np.zeros_like(w) for w in self.dense_w],
            dense_b=[np.zeros_like(b) for b in self.dense_b],
            embeddings=[np.zeros_like(t) for t in self.embeddings],
            version=self.version,
        )


@dataclass
class Batch:
    """One slice of training data in model-input space."""

    x_cont: np.ndarray  # (n, continuous_dim) float64
    x_cat: np.ndarray  # (n, n_categorical) integer ids
    labels: np.ndarray  # (n,) in {0, 1}

    def __post_init__(self):
        self.x_cont = np.asarray(self.x_cont, dtype=np.float64)
        self.x_cat = np.asarray(self.x_cat, dtype=np.int64)
        self.labels = np.asarray(self.labels)
        if self.x_cont.ndim != 2:
            raise ConfigError("x_cont must be 2-d (n, continuous_dim)")
        n = self.x_cont.shape[0]
        if self.x_cat.ndim != 2 or self.x_cat.shape[0] != n:
            raise ConfigError("x_cat must be 2-d with the same row count as x_cont")
        if self.labels.shape != (n,):
            raise ConfigError("labels must be a vector matching the row count")

    def __len__(self) -> int:
        return self.x_cont.shape[0]

    def take(self, idx: np.ndarray) -> "Batch":
        return Batch(self.x_cont[idx], self.x_cat[idx], self.labels[idx])


def init_weights(spec: ModelSpec) -> ModelWeights:
    """Deterministic init: Glorot-uniform dense weights, zero biases,
    uniform(-0.05, 0.05) embedding tables.

    Draw order is fixed (dense layers in order, then embedding tables in
    order) so a given seed always yields the same parameters.
    """
    rng = np.random.default_rng(spec.seed)
    dims = spec.layer_dims
    dense_w, dense_b = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        dense_w.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        dense_b.append(np.zeros(fan_out))
    embeddings = [
        rng.uniform(-0.05, 0.05, size=(e.vocab_size, e.embed_dim))
        for e in spec.embedding_specs
    ]
    return ModelWeights(dense_w=dense_w, dense_b=dense_b, embeddings=embeddings)


def _check_weights(weights: ModelWeights, spec: ModelSpec) -> None:
    dims = spec.layer_dims
    if len(weights.dense_w) != len(dims) - 1:
        raise ConfigError(
            f"weights hold {len(weights.dense_w)} dense layers, spec wants {len(dims) - 1}"
        )
    for i, (w, b) in enumerate(zip(weights.dense_w, weights.dense_b)):
        want = (dims[i], dims[i + 1])
        if w.shape != want:
            raise ConfigError(f"dense_{i}.weight has shape {w.shape}, expected {want}")
        if b.shape != (dims[i + 1],):
            raise ConfigError(f"dense_{i}.bias has shape {b.shape}, expected {(dims[i + 1],)}")
    if len(weights.embeddings) != len(spec.embedding_specs):
        raise ConfigError("embedding table count does not match spec")
    for j, (table, espec) in enumerate(zip(weights.embeddings, spec.embedding_specs)):
        want = (espec.vocab_size, espec.embed_dim)
        if table.shape != want:
            raise ConfigError(f"embedding_{j} has shape {table.shape}, expected {want}")


def _assemble_input(
    weights: ModelWeights, spec: ModelSpec, x_cont: np.ndarray, x_cat: np.ndarray
) -> np.ndarray:
    n = x_cont.shape[0]
    if x_cont.shape != (n, spec.continuous_dim):
        raise ConfigError(
            f"continuous input has shape {x_cont.shape}, expected {(n, spec.continuous_dim)}"
        )
    if x_cat.shape != (n, len(spec.embedding_specs)):
        raise ConfigError(
            f"categorical input has shape {x_cat.shape}, "
            f"expected {(n, len(spec.embedding_specs))}"
        )
    parts = [x_cont]
    for j, espec in enumerate(spec.embedding_specs):
        ids = x_cat[:, j]
        if ids.size and (ids.min() < 0 or ids.max() >= espec.vocab_size):
            bad = int(ids[(ids < 0) | (ids >= espec.vocab_size)][0])
            raise DataError(
                f"categorical feature {j} has id {bad} outside vocab of size {espec.vocab_size}"
            )
        parts.append(weights.embeddings[j][ids])
    return np.concatenate(parts, axis=1) if len(parts) > 1 else x_cont


def _activate(z: np.ndarray, spec: ModelSpec) -> np.ndarray:
    if spec.activation == "relu":
        return np.maximum(z, 0.0)
    return np.where(z > 0, z, spec.leaky_slope * z)


def _activate_grad(z: np.ndarray, spec: ModelSpec) -> np.ndarray:
    if spec.activation == "relu":
        return (z > 0).astype(np.float64)
    return np.where(z > 0, 1.0, spec.leaky_slope)


def forward_batch(
    weights: ModelWeights, spec: ModelSpec, x_cont: np.ndarray, x_cat: np.ndarray
) -> np.ndarray:
    """Score a batch; returns one logit per row. Pure and thread-safe."""
    _check_weights(weights, spec)
    x_cont = np.asarray(x_cont, dtype=np.float64)
    x_cat = np.asarray(x_cat, dtype=np.int64)
    a = _assemble_input(weights, spec, x_cont, x_cat)
    n_hidden = len(spec.hidden_layers)
    for i in range(n_hidden):
        a = _activate(a @ weights.dense_w[i] + weights.dense_b[i], spec)
    logits = a @ weights.dense_w[n_hidden] + weights.dense_b[n_hidden]
    return logits[:, 0]


def forward(
    weights: ModelWeights,
    spec: ModelSpec,
    x_cont: np.ndarray,
    x_cat: np.ndarray = (),
) -> float:
    """Score a single example; see forward_batch."""
    logit = forward_batch(
        weights,
        spec,
        np.asarray(x_cont, dtype=np.float64).reshape(1, -1),
        np.asarray(x_cat, dtype=np.int64).reshape(1, -1),
    )
    return float(logit[0])


def backward(
    weights: ModelWeights,
    spec: ModelSpec,
    batch: Batch,
    loss: str = "auc_surrogate",
    pair_reduction: str = "mean_over_pairs",
) -> tuple[float, ModelWeights]:
    """Loss value and gradients of (loss + l2 * sum ||W||^2) for one batch.

    The L2 term covers dense weight matrices only; biases and embedding
    tables are not penalized. Embedding tables receive gradient only in the
    rows the batch looked up.

    Raises:
        SkippableBatch: single-class batch under the pairwise loss.
    """
    _check_weights(weights, spec)
    if len(batch) == 0:
        raise DataError("empty batch")
    a = _assemble_input(weights, spec, batch.x_cont, batch.x_cat)

    n_hidden = len(spec.hidden_layers)
    pre_acts: list[np.ndarray] = []
    acts: list[np.ndarray] = [a]
    for i in range(n_hidden):
        z = acts[-1] @ weights.dense_w[i] + weights.dense_b[i]
        pre_acts.append(z)
        acts.append(_activate(z, spec))
    logits = (acts[-1] @ weights.dense_w[n_hidden] + weights.dense_b[n_hidden])[:, 0]

    loss_fn = get_loss(loss)
    if loss == "auc_surrogate":
        value, dlogits = loss_fn(logits, batch.labels, reduction=pair_reduction)
    else:
        value, dlogits = loss_fn(logits, batch.labels)

    grads = weights.zeros_like()
    delta = dlogits[:, None]
    grads.dense_w[n_hidden] = acts[-1].T @ delta
    grads.dense_b[n_hidden] = delta.sum(axis=0)
    upstream = delta @ weights.dense_w[n_hidden].T
    for i in range(n_hidden - 1, -1, -1):
        delta = upstream * _activate_grad(pre_acts[i], spec)
        grads.dense_w[i] = acts[i].T @ delta
        grads.dense_b[i] = delta.sum(axis=0)
        upstream = delta @ weights.dense_w[i].T

    # upstream is now the gradient w.r.t. the assembled input row
    offset = spec.continuous_dim
    for j, espec in enumerate(spec.embedding_specs):
        g = upstream[:, offset : offset + espec.embed_dim]
        np.add.at(grads.embeddings[j], batch.x_cat[:, j], g)
        offset += espec.embed_dim

    if spec.l2_coefficient > 0.0:
        c = spec.l2_coefficient
        for i, w in enumerate(weights.dense_w):
            value += c * float(np.sum(w * w))
            grads.dense_w[i] += 2.0 * c * w

    return value, grads


def multiplication_count(spec: ModelSpec) -> int:
    """Serving-cost proxy: entries of the input->hidden and hidden->hidden
    weight matrices, excluding the final hidden->output layer.
    """
    dims = (spec.input_dim, *spec.hidden_layers)
    return int(sum(a * b for a, b in zip(dims[:-1], dims[1:])))


# ---------------------------------------------------------------------------
# Model file format: versioned JSON with per-layer named arrays.
# float64 values are written with repr(), which round-trips bit-exactly.


def model_to_dict(weights: ModelWeights, spec: ModelSpec, platt=None) -> dict:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "precision": "f64",
        "spec": {
            "input_dim": spec.input_dim,
            "hidden_layers": list(spec.hidden_layers),
            "activation": spec.activation,
            "leaky_slope": spec.leaky_slope,
            "embedding_specs": [
                {"vocab_size": e.vocab_size, "embed_dim": e.embed_dim}
                for e in spec.embedding_specs
            ],
            "l2_coefficient": spec.l2_coefficient,
            "seed": spec.seed,
        },
        "arrays": {
            name: {"dims": list(arr.shape), "data": [float(v) for v in arr.ravel()]}
            for name, arr in weights.named_arrays()
        },
    }
    if platt is not None:
        doc["platt"] = {"w": float(platt.w), "b": float(platt.b), "fitted_on": platt.fitted_on}
    return doc


def model_from_dict(doc: dict):
    """Inverse of model_to_dict; returns (weights, spec, platt_or_None)."""
    from .calibration import PlattScaler  # local import to avoid a cycle

    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ConfigError(f"unsupported model format_version {doc.get('format_version')!r}")
    s = doc["spec"]
    spec = ModelSpec(
        input_dim=s["input_dim"],
        hidden_layers=tuple(s["hidden_layers"]),
        activation=s["activation"],
        leaky_slope=s["leaky_slope"],
        embedding_specs=tuple(
            EmbeddingSpec(e["vocab_size"], e["embed_dim"]) for e in s["embedding_specs"]
        ),
        l2_coefficient=s["l2_coefficient"],
        seed=s["seed"],
    )
    arrays = {}
    for name, rec in doc["arrays"].items():
        arr = np.array(rec["data"], dtype=np.float64).reshape(rec["dims"])
        arrays[name] = arr
    n_dense = len(spec.hidden_layers) + 1
    weights = ModelWeights(
        dense_w=[arrays[f"dense_{i}.weight"] for i in range(n_dense)],
        dense_b=[arrays[f"dense_{i}.bias"] for i in range(n_dense)],
        embeddings=[arrays[f"embedding_{j}"] for j in range(len(spec.embedding_specs))],
    )
    _check_weights(weights, spec)
    platt = None
    if "platt" in doc:
        p = doc["platt"]
        platt = PlattScaler(w=p["w"], b=p["b"], fitted_on=p.get("fitted_on", "unknown"))
    return weights, spec, platt


def save_model(path: str, weights: ModelWeights, spec: ModelSpec, platt=None) -> None:
    tmp = f"{path}.partial"
    with open(tmp, "w") as fh:
        json.dump(model_to_dict(weights, spec, platt), fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def load_model(path: str):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
