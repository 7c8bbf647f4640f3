import math

import numpy as np
import pytest
from pydantic import ValidationError

from conftest import triple
from ukge.core.errors import ScoreValidationError
from ukge.core.schema import NormalizationMethod, NormalizationSpec
from ukge.ingestion.normalize import normalize_scores

CN15K = NormalizationSpec(method=NormalizationMethod.LOG_MIN_MAX, lo=0.1, hi=3.0, floor=0.1)


def _scores(raw, spec):
    return [t.score for t in normalize_scores([triple(0, 0, i, s) for i, s in enumerate(raw)], spec)]


def test_log_min_max_bounds():
    assert _scores([3.0], CN15K) == pytest.approx([1.0])
    assert _scores([22.0], CN15K) == pytest.approx([1.0])
    assert _scores([0.05], CN15K) == pytest.approx([0.1])


def test_log_min_max_geometric_mean_lands_mid_range():
    (score,) = _scores([math.sqrt(0.1 * 3.0)], CN15K)
    assert score == pytest.approx(0.55, abs=1e-12)
    (rounded,) = _scores([0.5477], CN15K)
    assert rounded == pytest.approx(0.55, abs=1e-4)


def test_log_min_max_output_range():
    raw = np.random.default_rng(0).uniform(0.1, 22.0, size=200)
    out = _scores(raw, CN15K)
    assert min(out) >= 0.1 and max(out) <= 1.0


def test_log_rejects_non_positive_scores():
    with pytest.raises(ScoreValidationError):
        _scores([0.5, 0.0], CN15K)


def test_log_spec_needs_ordered_bounds():
    with pytest.raises(ValidationError):
        NormalizationSpec(method=NormalizationMethod.LOG_MIN_MAX, lo=3.0, hi=0.1)
    with pytest.raises(ValidationError):
        NormalizationSpec(method=NormalizationMethod.LOG_MIN_MAX, lo=0.1)


def test_identity_rejects_out_of_range():
    spec = NormalizationSpec()
    assert _scores([0.0, 0.5, 1.0], spec) == [0.0, 0.5, 1.0]
    with pytest.raises(ScoreValidationError):
        _scores([1.2], spec)


def test_min_max_maps_range_to_floor_and_one():
    spec = NormalizationSpec(method=NormalizationMethod.MIN_MAX, floor=0.2)
    assert _scores([2.0, 4.0, 6.0], spec) == pytest.approx([0.2, 0.6, 1.0])


def test_min_max_degenerate_range_maps_to_one():
    spec = NormalizationSpec(method=NormalizationMethod.MIN_MAX)
    assert _scores([5.0, 5.0], spec) == [1.0, 1.0]


@pytest.mark.parametrize("spec", [
    CN15K,
    NormalizationSpec(method=NormalizationMethod.MIN_MAX),
    NormalizationSpec(method=NormalizationMethod.MIN_MAX, floor=0.0),
])
def test_normalization_is_monotone(spec):
    raw = np.sort(np.random.default_rng(3).uniform(0.01, 30.0, size=100))
    out = _scores(raw, spec)
    assert all(a <= b for a, b in zip(out, out[1:]))
