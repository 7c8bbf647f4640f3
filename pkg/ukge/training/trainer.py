"""
Training Loop
-------------
Shuffled mini-batches over the training positives; each batch draws fresh
corrupted negatives, grounds rules on them, and takes one Adam step on the
joint objective. Every eval_every epochs the validation MSE is computed on a
snapshot and the best snapshot is kept until patience runs out.
"""

import json
import math
import time
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ukge.core.errors import ConfigError, TrainingError, VocabularyMismatchError
from ukge.core.logger import get_logger
from ukge.core.schema import Ablation, WeightedTriple
from ukge.ingestion.index import FactIndex
from ukge.ingestion.parser import Vocabulary
from ukge.ingestion.split import DatasetSplit, SamplingStats, sample_negatives
from ukge.models.embedding_model import ModelParams, confidence_batch, init_params
from ukge.reasoning.grounding import Grounder
from ukge.reasoning.rules import BoundRule
from ukge.training.config import TrainConfig
from ukge.training.losses import LossBreakdown, ObservedBatch, as_observed_batch, gradients, regularization
from ukge.training.optimizer import OptimizerState, adam_step

logger = get_logger(__name__)


class TrainingRecord(BaseModel):
    epoch: int
    train_loss: float
    observed_loss: float
    unseen_loss: float
    regularization: float
    train_mse: float
    val_mse: Optional[float] = None
    selection_mse: float
    wall_time: Optional[float] = None

    def to_json_line(self) -> str:
        return json.dumps(self.model_dump(exclude_none=True), sort_keys=True)


class TrainingResult:
    def __init__(
        self,
        params: ModelParams,
        records: List[TrainingRecord],
        best_epoch: int,
        stopped_early: bool,
        sampling: SamplingStats,
    ):
        self.params = params
        self.records = records
        self.best_epoch = best_epoch
        self.stopped_early = stopped_early
        self.sampling = sampling

    @property
    def best_selection_mse(self) -> float:
        return min(r.selection_mse for r in self.records)


class EarlyStopper:
    """Tracks the best score; signals a stop after `patience` consecutive non-improving updates."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best = math.inf
        self.stale = 0
        self.evaluations = 0

    def update(self, value: float) -> bool:
        self.evaluations += 1
        if value < self.best:
            self.best = value
            self.stale = 0
            return True
        self.stale += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.stale >= self.patience


def mse(params: ModelParams, batch: ObservedBatch) -> Optional[float]:
    if len(batch) == 0:
        return None
    residual = confidence_batch(params, batch.triples) - batch.scores
    return float(np.mean(residual * residual))


def _starting_params(
    config: TrainConfig, vocab: Vocabulary, initial: Optional[ModelParams], rng: np.random.Generator
) -> ModelParams:
    if initial is None:
        return init_params(vocab.num_entities, vocab.num_relations, config.dim, config.variant, rng)
    if initial.dim != config.dim:
        raise ConfigError(f"resumed model has dim {initial.dim}, config asks for {config.dim}")
    if initial.variant != config.variant:
        raise ConfigError(
            f"resumed model uses the {initial.variant.value} mapping, config asks for {config.variant.value}"
        )
    if initial.num_entities != vocab.num_entities or initial.num_relations != vocab.num_relations:
        raise VocabularyMismatchError(
            f"resumed model has {initial.num_entities} entities / {initial.num_relations} relations, "
            f"vocabulary has {vocab.num_entities} / {vocab.num_relations}"
        )
    return initial.snapshot()


def train(
    config: TrainConfig,
    split: DatasetSplit,
    rules: Sequence[BoundRule],
    vocab: Vocabulary,
    tau: float,
    initial_params: Optional[ModelParams] = None,
    log_path: Optional[Path] = None,
) -> TrainingResult:
    """
    Fit embeddings and (w, b) to the training split. Returns the snapshot with
    the lowest validation MSE (training MSE when there is no validation split).
    """
    if not split.train:
        raise TrainingError("training split is empty")

    rng = np.random.default_rng(config.seed)
    params = _starting_params(config, vocab, initial_params, rng)

    index = FactIndex.build(split.train, tau, num_entities=vocab.num_entities)
    grounder = Grounder(rules, index) if rules and config.ablation == Ablation.FULL else None
    train_batch = as_observed_batch(split.train)
    val_batch = as_observed_batch(split.validation)
    if len(val_batch) == 0:
        logger.warning("[TRAIN] validation split is empty; early stopping selects on training MSE")

    state = OptimizerState.zeros_like(params)
    stopper = EarlyStopper(config.patience)
    sampling = SamplingStats()
    records: List[TrainingRecord] = []
    best_params = params.snapshot()
    best_epoch = 0
    stopped_early = False
    started = time.perf_counter()

    log_file = None
    if log_path is not None:
        Path(log_path).parent.mkdir(parents=True, exist_ok=True)
        log_file = open(log_path, "w", encoding="utf-8", newline="")

    logger.info(
        f"[TRAIN] status=start | train={len(train_batch)} | validation={len(val_batch)} "
        f"| rules={len(rules)} | variant={config.variant.value} | ablation={config.ablation.value} "
        f"| dim={config.dim} | seed={config.seed}"
    )

    try:
        n = len(train_batch)
        for epoch in range(1, config.max_epochs + 1):
            epoch_loss = LossBreakdown()
            order = rng.permutation(n)
            for start in range(0, n, config.batch_size):
                batch: List[WeightedTriple] = [split.train[i] for i in order[start:start + config.batch_size]]
                if config.ablation == Ablation.NO_NEGATIVES:
                    negatives = np.zeros((0, 3), dtype=np.int64)
                else:
                    negatives = sample_negatives(batch, config.negatives_per_positive, index, rng, sampling)

                grads, parts = gradients(params, batch, negatives, grounder, config.l2_lambda, config.ablation)
                epoch_loss.observed += parts.observed
                epoch_loss.unseen += parts.unseen
                params, state = adam_step(
                    params, grads, state, config.learning_rate,
                    config.adam_beta1, config.adam_beta2, config.epsilon,
                )

            if epoch % config.eval_every != 0 and epoch != config.max_epochs:
                continue

            snapshot = params.snapshot()
            train_mse = mse(snapshot, train_batch)
            val_mse = mse(snapshot, val_batch)
            selection = val_mse if val_mse is not None else train_mse
            epoch_loss.regularization = regularization(snapshot, config.l2_lambda)
            record = TrainingRecord(
                epoch=epoch,
                train_loss=epoch_loss.total,
                observed_loss=epoch_loss.observed,
                unseen_loss=epoch_loss.unseen,
                regularization=epoch_loss.regularization,
                train_mse=train_mse,
                val_mse=val_mse,
                selection_mse=selection,
                wall_time=round(time.perf_counter() - started, 3) if config.log_wall_time else None,
            )
            records.append(record)
            if log_file is not None:
                log_file.write(record.to_json_line() + "\n")
                log_file.flush()

            if stopper.update(selection):
                best_params = snapshot
                best_epoch = epoch
            logger.info(
                f"[TRAIN] epoch={epoch} | loss={record.train_loss:.6f} | train_mse={train_mse:.6f} "
                f"| selection_mse={selection:.6f} | best_epoch={best_epoch}"
            )
            if stopper.should_stop:
                stopped_early = True
                break
    finally:
        if log_file is not None:
            log_file.close()

    if grounder is not None:
        logger.info(
            f"[GROUND] cache_size={grounder.cache_size} | hits={grounder.hits} | misses={grounder.misses}"
        )
    if sampling.skipped:
        logger.warning(f"[NEGATIVES] skipped={sampling.skipped} | emitted={sampling.emitted}")
    logger.info(
        f"[TRAIN] status=complete | evaluations={len(records)} | best_epoch={best_epoch} "
        f"| best_mse={stopper.best:.6f} | stopped_early={stopped_early}"
    )
    return TrainingResult(best_params, records, best_epoch, stopped_early, sampling)


def load_training_log(path: Path) -> pd.DataFrame:
    """One row per logged evaluation, columns as in TrainingRecord."""
    return pd.read_json(path, lines=True, dtype=False)
