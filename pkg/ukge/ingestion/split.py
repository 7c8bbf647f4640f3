"""
Dataset Splitting and Negative Sampling
---------------------------------------
Partitions deduplicated facts into train/validation/test and builds negative
links by corrupting exactly one entity slot (head or tail) of an observed fact.
The relation slot is never corrupted.
"""

import math
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ukge.core.errors import DataError, SplitError
from ukge.core.logger import get_logger
from ukge.core.schema import TripleKey, WeightedTriple
from ukge.ingestion.index import FactIndex

logger = get_logger(__name__)

DEFAULT_RATIOS = (0.85, 0.07, 0.08)
MAX_CORRUPTION_ATTEMPTS = 100


class DatasetSplit(BaseModel):
    train: List[WeightedTriple]
    validation: List[WeightedTriple]
    test: List[WeightedTriple]
    test_negatives: List[WeightedTriple] = Field(default_factory=list)

    def all_observed(self) -> List[WeightedTriple]:
        return [*self.train, *self.validation, *self.test]


class SamplingStats(BaseModel):
    emitted: int = 0
    skipped: int = 0


def corrupt(
    key: TripleKey,
    replace_head: bool,
    num_entities: int,
    known: FactIndex,
    rng: np.random.Generator,
    extra_excluded: Optional[Set[TripleKey]] = None,
    max_attempts: int = MAX_CORRUPTION_ATTEMPTS,
) -> Optional[TripleKey]:
    """Replace the head or tail with a uniform random entity; None if every attempt collides."""
    h, r, t = key
    for _ in range(max_attempts):
        e = int(rng.integers(num_entities))
        candidate = (e, r, t) if replace_head else (h, r, e)
        if candidate in known:
            continue
        if extra_excluded is not None and candidate in extra_excluded:
            continue
        return candidate
    return None


def sample_negatives(
    batch: Sequence[WeightedTriple],
    per_positive: int,
    index: FactIndex,
    rng: np.random.Generator,
    stats: Optional[SamplingStats] = None,
) -> np.ndarray:
    """
    Emit per_positive unseen triples per positive, alternating head and tail corruption.

    Returns an int64 array of shape (m, 3). Positives whose corruption keeps
    colliding with observed facts are skipped and counted in stats.
    """
    if per_positive < 1:
        raise DataError(f"per_positive must be >= 1, got {per_positive}")
    if index.num_entities < 2:
        raise DataError("negative sampling needs at least 2 entities")

    stats = stats if stats is not None else SamplingStats()
    out: List[TripleKey] = []
    skipped_here = 0
    for positive in batch:
        for j in range(per_positive):
            candidate = corrupt(positive.key, j % 2 == 0, index.num_entities, index, rng)
            if candidate is None:
                skipped_here += 1
                continue
            out.append(candidate)

    stats.emitted += len(out)
    stats.skipped += skipped_here
    if skipped_here:
        logger.debug(f"[NEGATIVES] skipped={skipped_here} | emitted={len(out)}")
    if not out:
        return np.zeros((0, 3), dtype=np.int64)
    return np.asarray(out, dtype=np.int64)


def _partition_sizes(n: int, ratios: Tuple[float, float, float]) -> Tuple[int, int, int]:
    """Largest-remainder rounding: sizes always sum to n, ties go to the earlier split."""
    quotas = [r * n for r in ratios]
    sizes = [int(math.floor(q)) for q in quotas]
    by_remainder = sorted(range(3), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in by_remainder[:n - sum(sizes)]:
        sizes[i] += 1
    return sizes[0], sizes[1], sizes[2]


def split_dataset(
    triples: Sequence[WeightedTriple],
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 0,
    num_entities: Optional[int] = None,
) -> DatasetSplit:
    """
    Deterministic train/validation/test partition plus one negative link per test fact.

    Negatives get score 0 and never coincide with any observed fact or each other.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise SplitError(f"ratios must be three non-negative numbers, got {list(ratios)}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise SplitError(f"ratios must sum to 1, got {sum(ratios)}")

    keys = [t.key for t in triples]
    if len(set(keys)) != len(keys):
        raise SplitError("triples must be deduplicated before splitting")

    n = len(triples)
    sizes = _partition_sizes(n, tuple(ratios))
    for name, ratio, size in zip(("train", "validation", "test"), ratios, sizes):
        if ratio > 0 and size < 1:
            raise SplitError(f"dataset of {n} triples is too small: {name} split would be empty")

    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train, n_val, _ = sizes
    train = [triples[i] for i in order[:n_train]]
    validation = [triples[i] for i in order[n_train:n_train + n_val]]
    test = [triples[i] for i in order[n_train + n_val:]]

    num_entities = num_entities if num_entities is not None else 1 + max(
        (max(t.head, t.tail) for t in triples), default=-1
    )
    index = FactIndex.build(triples, tau=1.0, num_entities=num_entities)
    test_negatives = _test_negatives(test, index, rng)

    logger.info(
        f"[SPLIT] seed={seed} | train={len(train)} | validation={len(validation)} "
        f"| test={len(test)} | negatives={len(test_negatives)}"
    )
    return DatasetSplit(train=train, validation=validation, test=test, test_negatives=test_negatives)


def _test_negatives(test: Sequence[WeightedTriple], index: FactIndex, rng: np.random.Generator) -> List[WeightedTriple]:
    if not test:
        return []
    if index.num_entities < 2:
        raise SplitError("negative links need at least 2 entities")

    generated: Set[TripleKey] = set()
    negatives: List[WeightedTriple] = []
    for i in range(len(test)):
        candidate = None
        # fall back to other test facts as the base when this one is saturated
        for offset in range(len(test)):
            base = test[(i + offset) % len(test)]
            replace_head = bool(rng.integers(2))
            candidate = corrupt(base.key, replace_head, index.num_entities, index, rng, generated)
            if candidate is not None:
                break
        if candidate is None:
            raise SplitError("could not generate enough unseen negative links; the graph is too dense")
        generated.add(candidate)
        h, r, t = candidate
        negatives.append(WeightedTriple(head=h, relation=r, tail=t, score=0.0))
    return negatives
