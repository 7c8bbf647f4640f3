"""
Strong-Fact Classification
--------------------------
A fact is strong when it is observed and its score exceeds tau; everything else
(weak facts and unseen links) is labelled 0. A one-feature logistic regression
is fit on predicted confidences and scored with F-1 on the strong class and
overall accuracy.
"""

import warnings
from typing import List, Sequence, Set, Tuple

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import accuracy_score, f1_score

from ukge.core.errors import EvaluationError
from ukge.core.logger import get_logger
from ukge.core.schema import TripleKey, WeightedTriple
from ukge.ingestion.index import FactIndex
from ukge.ingestion.split import DatasetSplit, corrupt
from ukge.models.embedding_model import ModelParams, confidence_batch

logger = get_logger(__name__)

ScoredLabel = Tuple[float, int]


def _to_arrays(pairs: Sequence[ScoredLabel]) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray([p[0] for p in pairs], dtype=np.float64).reshape(-1, 1)
    y = np.asarray([p[1] for p in pairs], dtype=np.int64)
    return x, y


def fit_classifier(train_pairs: Sequence[ScoredLabel]) -> LogisticRegression:
    x, y = _to_arrays(train_pairs)
    if len(np.unique(y)) < 2:
        raise EvaluationError("classifier training data contains a single class")
    # newton-cg is deterministic; the large C keeps separable fits finite
    model = LogisticRegression(solver="newton-cg", tol=1e-8, C=1e6, max_iter=1000)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        model.fit(x, y)
    for w in caught:
        if issubclass(w.category, ConvergenceWarning):
            logger.warning(f"[CLASSIFY] convergence={w.message}")
    return model


def classify_strong(
    train_pairs: Sequence[ScoredLabel],
    test_pairs: Sequence[ScoredLabel],
) -> Tuple[float, float]:
    """Fit on (confidence, label) training pairs; return (F-1, accuracy) on the test pairs."""
    if not test_pairs:
        raise EvaluationError("classification test set is empty")
    model = fit_classifier(train_pairs)
    x, y = _to_arrays(test_pairs)
    predicted = model.predict(x)
    f1 = f1_score(y, predicted, pos_label=1, zero_division=0)
    return float(f1), float(accuracy_score(y, predicted))


def strong_label(fact: WeightedTriple, tau: float) -> int:
    return int(fact.score > tau)


def _sample_unseen(
    bases: Sequence[WeightedTriple],
    index: FactIndex,
    excluded: Set[TripleKey],
    rng: np.random.Generator,
) -> List[TripleKey]:
    out: List[TripleKey] = []
    for base in bases:
        candidate = corrupt(base.key, bool(rng.integers(2)), index.num_entities, index, rng, excluded)
        if candidate is None:
            continue
        excluded.add(candidate)
        out.append(candidate)
    return out


def build_classification_sets(
    params: ModelParams,
    split: DatasetSplit,
    tau: float,
    seed: int = 0,
) -> Tuple[List[ScoredLabel], List[ScoredLabel]]:
    """
    Train pairs: validation facts plus as many sampled unseen links. Test pairs:
    test facts plus the split's test negatives. Falls back to training facts
    when the validation split is empty.
    """
    rng = np.random.default_rng(seed)
    positives = split.validation
    if not positives:
        logger.warning("[CLASSIFY] validation split is empty; classifier is fit on training facts")
        positives = split.train

    index = FactIndex.build(split.all_observed(), tau, num_entities=params.num_entities)
    excluded = {t.key for t in split.test_negatives}
    negatives = _sample_unseen(positives, index, excluded, rng)

    def scored(keys: List[TripleKey]) -> np.ndarray:
        if not keys:
            return np.zeros(0)
        return confidence_batch(params, np.asarray(keys, dtype=np.int64))

    train_conf = scored([t.key for t in positives] + negatives)
    train_labels = [strong_label(t, tau) for t in positives] + [0] * len(negatives)
    test_conf = scored([t.key for t in split.test] + [t.key for t in split.test_negatives])
    test_labels = [strong_label(t, tau) for t in split.test] + [0] * len(split.test_negatives)

    train_pairs = [(float(c), int(l)) for c, l in zip(train_conf, train_labels)]
    test_pairs = [(float(c), int(l)) for c, l in zip(test_conf, test_labels)]
    return train_pairs, test_pairs
