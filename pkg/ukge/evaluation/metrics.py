from typing import Sequence, Tuple

import numpy as np

from ukge.core.errors import EvaluationError
from ukge.core.schema import WeightedTriple
from ukge.models.embedding_model import ModelParams, confidence_batch


def confidence_metrics(
    params: ModelParams,
    test: Sequence[WeightedTriple],
    test_negatives: Sequence[WeightedTriple] = (),
    include_negatives: bool = True,
) -> Tuple[float, float]:
    """
    (MSE, MAE) of predicted confidence against ground truth over the test facts.
    With include_negatives, the negative links join the pool at target 0.
    """
    if not test:
        raise EvaluationError("confidence prediction needs a non-empty test split")
    pool = list(test)
    if include_negatives:
        pool.extend(t.with_score(0.0) for t in test_negatives)

    triples = np.asarray([t.key for t in pool], dtype=np.int64)
    targets = np.asarray([t.score for t in pool], dtype=np.float64)
    errors = confidence_batch(params, triples) - targets
    return float(np.mean(errors * errors)), float(np.mean(np.abs(errors)))
