import math
from typing import List, Sequence

from ukge.core.errors import ScoreValidationError
from ukge.core.schema import NormalizationMethod, NormalizationSpec, WeightedTriple


def normalize_scores(triples: Sequence[WeightedTriple], spec: NormalizationSpec) -> List[WeightedTriple]:
    """
    Map raw confidence scores into [0, 1].

    - log-min-max: clamp to [lo, hi], then map log(x) affinely onto [floor, 1].
    - min-max: map the observed raw range onto [floor, 1]; a degenerate range maps to 1.
    - identity: scores must already lie in [0, 1].

    Every method is monotone in the raw score.
    """
    for t in triples:
        if not math.isfinite(t.score):
            raise ScoreValidationError(f"non-finite score {t.score} for triple {t.key}")

    if spec.method == NormalizationMethod.IDENTITY:
        for t in triples:
            if not 0.0 <= t.score <= 1.0:
                raise ScoreValidationError(f"score {t.score} outside [0, 1] for triple {t.key} under identity")
        return list(triples)

    if spec.method == NormalizationMethod.LOG_MIN_MAX:
        for t in triples:
            if t.score <= 0.0:
                raise ScoreValidationError(f"non-positive score {t.score} for triple {t.key} under log normalization")
        log_lo, log_hi = math.log(spec.lo), math.log(spec.hi)
        span = log_hi - log_lo
        out = []
        for t in triples:
            x = min(max(t.score, spec.lo), spec.hi)
            unit = (math.log(x) - log_lo) / span
            out.append(t.with_score(_affine(unit, spec.floor)))
        return out

    if not triples:
        return []
    lo = min(t.score for t in triples)
    hi = max(t.score for t in triples)
    if hi == lo:
        return [t.with_score(1.0) for t in triples]
    return [t.with_score(_affine((t.score - lo) / (hi - lo), spec.floor)) for t in triples]


def _affine(unit: float, floor: float) -> float:
    # unit in [0, 1] -> [floor, 1]; clipped to absorb rounding at the ends
    return min(1.0, max(floor, floor + (1.0 - floor) * unit))
