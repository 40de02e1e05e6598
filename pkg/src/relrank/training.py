"""Single-threaded, seed-deterministic training loop.

Shuffles per epoch, steps Adam on each batch, evaluates validation AUC on a
fixed cadence, feeds the plateau scheduler, and keeps the weights of the
best-validation checkpoint. Batches that cannot drive the pairwise loss
(single class) are skipped and counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NumericError, SkippableBatch
from .metrics import exact_auc
from .network import Batch, ModelSpec, ModelWeights, backward, forward_batch, init_weights
from .optim import Adam, AdamConfig, PlateauScheduler


@dataclass(frozen=True)
class SchedulerConfig:
    patience_evals: int = 3
    factor: float = 0.5
    min_delta: float = 1e-4
    min_lr: float = 1e-6


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 5000
    initial_lr: float = 1e-3
    adam: AdamConfig = field(default_factory=AdamConfig)
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    max_epochs: int = 20
    loss: str = "auc_surrogate"
    pair_reduction: str = "mean_over_pairs"
    eval_every: int = 20  # steps

    def __post_init__(self):
        if self.batch_size < 1 or self.max_epochs < 1 or self.eval_every < 1:
            raise ValueError("batch_size, max_epochs and eval_every must be positive")
        if self.initial_lr <= 0:
            raise ValueError("initial_lr must be positive")
        if self.loss not in ("auc_surrogate", "cross_entropy"):
            raise ValueError(f"unknown loss {self.loss!r}")


@dataclass(frozen=True)
class EvalRecord:
    step: int
    lr: float
    train_loss: float
    validation_auc: float


@dataclass
class TrainLog:
    evals: list[EvalRecord] = field(default_factory=list)
    skipped_batches: int = 0
    best_step: int = 0
    best_validation_auc: float = float("-inf")


def train(
    spec: ModelSpec,
    train_set: Batch,
    validation_set: Batch,
    config: TrainConfig = TrainConfig(),
) -> tuple[ModelWeights, TrainLog]:
    """Fit the network; returns the best-validation-AUC checkpoint and a log.

    Weight init and batch order both derive from ``spec.seed``, so one seed
    always reproduces the same weights bit for bit.

    Raises:
        DataError: empty sets, or validation has a single class (AUC undefined).
        NumericError: the training objective went non-finite.
    """
    if len(train_set) == 0 or len(validation_set) == 0:
        raise DataError("train and validation sets must be non-empty")
    val_labels = validation_set.labels
    if val_labels.sum() in (0, val_labels.size):
        raise DataError("validation AUC undefined: a single class is present")

    weights = init_weights(spec)  # spec.seed governs init draws
    # batch shuffling gets its own stream so init and data order stay independent
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 1]))
    optimizer = Adam(weights, config.adam)
    scheduler = PlateauScheduler(
        lr=config.initial_lr,
        factor=config.scheduler.factor,
        patience=config.scheduler.patience_evals,
        min_delta=config.scheduler.min_delta,
        min_lr=config.scheduler.min_lr,
    )

    log = TrainLog()
    best_weights = weights.copy()
    lr = config.initial_lr
    step = 0
    losses_since_eval: list[float] = []

    def evaluate() -> None:
        nonlocal lr
        val_logits = forward_batch(weights, spec, validation_set.x_cont, validation_set.x_cat)
        auc = exact_auc(val_logits, val_labels)
        train_loss = float(np.mean(losses_since_eval)) if losses_since_eval else float("nan")
        log.evals.append(EvalRecord(step=step, lr=lr, train_loss=train_loss, validation_auc=auc))
        losses_since_eval.clear()
        if auc > log.best_validation_auc:
            log.best_validation_auc = auc
            log.best_step = step
            best_weights.dense_w = [w.copy() for w in weights.dense_w]
            best_weights.dense_b = [b.copy() for b in weights.dense_b]
            best_weights.embeddings = [t.copy() for t in weights.embeddings]
        lr = scheduler.update(auc)

    n = len(train_set)
    for _ in range(config.max_epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = train_set.take(order[start : start + config.batch_size])
            try:
                value, grads = backward(
                    weights, spec, batch, loss=config.loss, pair_reduction=config.pair_reduction
                )
            except SkippableBatch:
                log.skipped_batches += 1
                continue
            if not np.isfinite(value):
                raise NumericError(f"training objective went non-finite at step {step}")
            optimizer.step(weights, grads, lr)
            step += 1
            losses_since_eval.append(value)
            if step % config.eval_every == 0:
                evaluate()

    if losses_since_eval or not log.evals:
        evaluate()
    return best_weights, log
