"""
Tail Ranking
------------
For a query (h, r, ?) every entity in the vocabulary is scored as a tail and
sorted by confidence, ties broken by ascending entity id. Known facts are not
filtered; relevance is the ground-truth confidence of observed tails, 0 for
everything else.

    DCG  = sum_i gain(rel_i) / log2(i + 1)
    nDCG = DCG / ideal DCG

Linear gain is rel, exponential gain is 2^rel - 1.
"""

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ukge.core.errors import EvaluationError, VocabularyMismatchError
from ukge.core.logger import get_logger
from ukge.core.schema import Gain, RelevancePool
from ukge.core.settings import num_threads
from ukge.ingestion.parser import Vocabulary
from ukge.ingestion.split import DatasetSplit
from ukge.models.embedding_model import ModelParams, tail_confidences

logger = get_logger(__name__)


class RankQuery(BaseModel):
    head: int = Field(..., ge=0)
    relation: int = Field(..., ge=0)
    relevance: Dict[int, float]

    @field_validator("relevance")
    @classmethod
    def _check_relevance(cls, v: Dict[int, float]) -> Dict[int, float]:
        for tail, score in v.items():
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"relevance of tail {tail} is {score}, expected [0, 1]")
        return v


def _gain(values: np.ndarray, gain: Gain) -> np.ndarray:
    if gain == Gain.EXPONENTIAL:
        return np.exp2(values) - 1.0
    return values


def ranking_order(scores: np.ndarray) -> np.ndarray:
    """Entity ids sorted by descending score; stable sort keeps ties in id order."""
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


def ndcg_from_scores(scores: np.ndarray, relevance: Mapping[int, float], gain: Gain) -> Optional[float]:
    """nDCG of the ranking induced by scores; None when the ideal DCG is zero."""
    tails = np.fromiter(relevance.keys(), dtype=np.int64, count=len(relevance))
    rel = np.fromiter(relevance.values(), dtype=np.float64, count=len(relevance))
    gains = _gain(rel, gain)

    ideal_gains = np.sort(gains)[::-1]
    ideal = float(np.sum(ideal_gains / np.log2(np.arange(2, len(ideal_gains) + 2))))
    if ideal <= 0.0:
        return None

    position = np.empty(len(scores), dtype=np.int64)
    position[ranking_order(scores)] = np.arange(1, len(scores) + 1)
    dcg = float(np.sum(gains / np.log2(position[tails] + 1)))
    return min(1.0, dcg / ideal)


def _check_vocab(params: ModelParams, vocab: Optional[Vocabulary]) -> None:
    if vocab is not None and vocab.num_entities != params.num_entities:
        raise VocabularyMismatchError(
            f"model has {params.num_entities} entities, vocabulary has {vocab.num_entities}"
        )


def ndcg(query: RankQuery, params: ModelParams, gain: Gain, vocab: Optional[Vocabulary] = None) -> Optional[float]:
    _check_vocab(params, vocab)
    return ndcg_from_scores(tail_confidences(params, query.head, query.relation), query.relevance, gain)


def score_queries(
    params: ModelParams,
    queries: Sequence[RankQuery],
    gain: Gain,
    vocab: Optional[Vocabulary] = None,
    threads: Optional[int] = None,
) -> List[Optional[float]]:
    """Per-query nDCG in query order; None marks a skipped (zero ideal DCG) query."""
    _check_vocab(params, vocab)
    threads = threads if threads is not None else num_threads()
    if threads <= 1 or len(queries) < 2:
        return [ndcg(q, params, gain) for q in queries]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda q: ndcg(q, params, gain), queries))


def summarize_ndcg(values: Sequence[Optional[float]]) -> Tuple[float, int, int]:
    """(mean, scored, skipped). Skipped queries stay out of the denominator."""
    scored = [v for v in values if v is not None]
    skipped = len(values) - len(scored)
    if not scored:
        raise EvaluationError(f"no scorable ranking queries ({skipped} skipped)")
    if skipped:
        logger.warning(f"[RANK] skipped={skipped} | reason=zero ideal DCG")
    return float(np.mean(scored)), len(scored), skipped


def mean_ndcg(
    params: ModelParams,
    queries: Sequence[RankQuery],
    gain: Gain,
    vocab: Optional[Vocabulary] = None,
) -> float:
    mean, _, _ = summarize_ndcg(score_queries(params, queries, gain, vocab))
    return mean


def build_rank_queries(
    split: DatasetSplit,
    vocab: Optional[Vocabulary] = None,
    pool: RelevancePool = RelevancePool.ALL,
) -> List[RankQuery]:
    """
    One query per distinct (h, r) of the test split, in sorted order. Relevance
    comes from every observed fact (pool=all) or the test facts only (pool=test).
    """
    wanted = sorted({(t.head, t.relation) for t in split.test})
    if not wanted:
        return []
    facts = split.all_observed() if pool == RelevancePool.ALL else split.test
    relevance: Dict[Tuple[int, int], Dict[int, float]] = defaultdict(dict)
    for t in facts:
        relevance[(t.head, t.relation)][t.tail] = t.score

    if vocab is not None:
        top = max(max(h for h, _ in wanted), max(t.tail for t in facts))
        if top >= vocab.num_entities:
            raise VocabularyMismatchError(f"entity id {top} is outside the vocabulary")
    return [RankQuery(head=h, relation=r, relevance=relevance[(h, r)]) for h, r in wanted]


def top_k_tails(params: ModelParams, head: int, relation: int, k: int) -> List[Tuple[int, float]]:
    """Best k (tail id, confidence) pairs, descending, ties by ascending id; k is clamped to |E|."""
    scores = tail_confidences(params, head, relation)
    order = ranking_order(scores)[:max(0, min(k, params.num_entities))]
    return [(int(e), float(scores[e])) for e in order]
