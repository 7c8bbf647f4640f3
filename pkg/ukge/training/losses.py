"""
Joint Objective
---------------
    J = sum_{l observed} (f(l) - s_l)^2
      + sum_{l unseen} [ f(l)^2 + sum_{gamma in ground rules of l} (w_gamma * max(0, body_gamma - f(l)))^2 ]
      + lambda * (||E||_F^2 + ||R||_F^2)

The f(l)^2 term is the negation prior every unseen triple carries. Body values
are constants, so gradients reach only the embeddings of the rule head.
Ablations: no-negatives drops the unseen term, no-psl keeps only the prior.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel

from ukge.core.schema import Ablation, WeightedTriple
from ukge.models.embedding_model import (
    ModelParams,
    apply_mapping,
    as_triple_array,
    mapping_slope,
    plausibility_batch,
)
from ukge.reasoning.grounding import Grounder, GroundingTerms


@dataclass
class ObservedBatch:
    triples: np.ndarray   # (n, 3) int64
    scores: np.ndarray    # (n,) float64

    def __len__(self) -> int:
        return int(self.triples.shape[0])

    def take(self, rows: np.ndarray) -> "ObservedBatch":
        return ObservedBatch(self.triples[rows], self.scores[rows])


BatchLike = Union[ObservedBatch, Sequence[WeightedTriple]]


def as_observed_batch(batch: BatchLike) -> ObservedBatch:
    if isinstance(batch, ObservedBatch):
        return batch
    if len(batch) == 0:
        return ObservedBatch(np.zeros((0, 3), dtype=np.int64), np.zeros(0))
    triples = np.asarray([t.key for t in batch], dtype=np.int64)
    scores = np.asarray([t.score for t in batch], dtype=np.float64)
    return ObservedBatch(triples, scores)


class LossBreakdown(BaseModel):
    observed: float = 0.0
    unseen: float = 0.0
    regularization: float = 0.0

    @property
    def total(self) -> float:
        return self.observed + self.unseen + self.regularization

    def __add__(self, other: "LossBreakdown") -> "LossBreakdown":
        return LossBreakdown(
            observed=self.observed + other.observed,
            unseen=self.unseen + other.unseen,
            regularization=self.regularization + other.regularization,
        )


@dataclass
class Gradients:
    entity: np.ndarray
    relation: np.ndarray
    w: float = 0.0
    b: float = 0.0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "Gradients":
        return cls(np.zeros_like(params.entity), np.zeros_like(params.relation))


def _forward(params: ModelParams, triples: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    g = plausibility_batch(params, triples)
    return g, np.asarray(apply_mapping(params, g), dtype=np.float64)


def _terms(negatives: np.ndarray, grounder: Optional[Grounder], ablation: Ablation) -> GroundingTerms:
    if grounder is None or ablation != Ablation.FULL or negatives.shape[0] == 0:
        return GroundingTerms.empty()
    return grounder.ground_batch(negatives)


def _unseen_from(f: np.ndarray, terms: GroundingTerms) -> float:
    loss = float(np.sum(f * f))
    if len(terms):
        gap = np.maximum(0.0, terms.body_value - f[terms.owner])
        loss += float(np.sum((terms.weight * gap) ** 2))
    return loss


def loss_observed(params: ModelParams, batch: BatchLike) -> float:
    batch = as_observed_batch(batch)
    if len(batch) == 0:
        return 0.0
    _, f = _forward(params, batch.triples)
    residual = f - batch.scores
    return float(np.sum(residual * residual))


def loss_unseen(
    params: ModelParams,
    negatives: np.ndarray,
    grounder: Optional[Grounder] = None,
    ablation: Ablation = Ablation.FULL,
) -> float:
    """Negation prior on every negative plus the squared weighted distance of each ground rule."""
    negatives = as_triple_array(negatives)
    if negatives.shape[0] == 0 or ablation == Ablation.NO_NEGATIVES:
        return 0.0
    _, f = _forward(params, negatives)
    return _unseen_from(f, _terms(negatives, grounder, ablation))


def regularization(params: ModelParams, l2_lambda: float) -> float:
    return float(l2_lambda * (np.sum(params.entity * params.entity) + np.sum(params.relation * params.relation)))


def joint_loss(
    params: ModelParams,
    batch: BatchLike,
    negatives: np.ndarray,
    grounder: Optional[Grounder],
    l2_lambda: float,
    ablation: Ablation = Ablation.FULL,
) -> LossBreakdown:
    return LossBreakdown(
        observed=loss_observed(params, batch),
        unseen=loss_unseen(params, negatives, grounder, ablation),
        regularization=regularization(params, l2_lambda),
    )


def _backprop(params: ModelParams, triples: np.ndarray, g: np.ndarray, f: np.ndarray,
              dloss_df: np.ndarray, grads: Gradients) -> None:
    dloss_dz = dloss_df * mapping_slope(params, g, f)
    grads.w += float(np.sum(dloss_dz * g))
    grads.b += float(np.sum(dloss_dz))

    dloss_dg = (dloss_dz * params.w)[:, None]
    heads, rels, tails = triples[:, 0], triples[:, 1], triples[:, 2]
    h = params.entity[heads]
    r = params.relation[rels]
    t = params.entity[tails]
    np.add.at(grads.entity, heads, dloss_dg * (r * t))
    np.add.at(grads.entity, tails, dloss_dg * (r * h))
    np.add.at(grads.relation, rels, dloss_dg * (h * t))


def gradients(
    params: ModelParams,
    batch: BatchLike,
    negatives: np.ndarray,
    grounder: Optional[Grounder],
    l2_lambda: float,
    ablation: Ablation = Ablation.FULL,
) -> Tuple[Gradients, LossBreakdown]:
    """
    Exact (sub)gradients of joint_loss. Untouched embedding rows only receive the
    regularizer's 2*lambda*param; the hinge and rectifier kinks use subgradient 0.
    """
    batch = as_observed_batch(batch)
    negatives = as_triple_array(negatives)
    grads = Gradients.zeros_like(params)
    parts = LossBreakdown()

    if len(batch):
        g, f = _forward(params, batch.triples)
        residual = f - batch.scores
        parts.observed = float(np.sum(residual * residual))
        _backprop(params, batch.triples, g, f, 2.0 * residual, grads)

    if negatives.shape[0] and ablation != Ablation.NO_NEGATIVES:
        terms = _terms(negatives, grounder, ablation)
        g, f = _forward(params, negatives)
        parts.unseen = _unseen_from(f, terms)
        dloss_df = 2.0 * f
        if len(terms):
            gap = terms.body_value - f[terms.owner]
            active = gap > 0.0
            np.add.at(dloss_df, terms.owner[active], -2.0 * terms.weight[active] ** 2 * gap[active])
        _backprop(params, negatives, g, f, dloss_df, grads)

    if l2_lambda:
        parts.regularization = regularization(params, l2_lambda)
        grads.entity += 2.0 * l2_lambda * params.entity
        grads.relation += 2.0 * l2_lambda * params.relation

    return grads, parts
