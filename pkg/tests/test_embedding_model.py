import math

import numpy as np
import pytest

from conftest import make_params
from ukge.core.schema import Variant
from ukge.models.embedding_model import (
    ModelParams,
    confidence,
    confidence_batch,
    map_logistic,
    map_rectifier,
    plausibility,
    plausibility_batch,
    rectifier_init_bound,
    tail_confidences,
)


def _params(entity, relation, variant=Variant.RECTIFIER, w=1.0, b=0.0):
    return ModelParams(np.asarray(entity, float), np.asarray(relation, float), w=w, b=b, variant=variant)


def test_plausibility_hand_example():
    params = _params([[1, 2], [3, -1]], [[1, 1]])
    assert plausibility(params, (0, 0, 1)) == 1.0


def test_plausibility_zero_head():
    params = _params([[0, 0], [3, -1]], [[5, 7]])
    assert plausibility(params, (0, 0, 1)) == 0.0


def test_plausibility_is_symmetric(rng):
    params = make_params(num_entities=20, num_relations=4, dim=8)
    triples = np.column_stack([rng.integers(20, size=100), rng.integers(4, size=100), rng.integers(20, size=100)])
    swapped = triples[:, [2, 1, 0]]
    assert np.allclose(plausibility_batch(params, triples), plausibility_batch(params, swapped), rtol=0, atol=1e-12)


def test_plausibility_matches_naive_loop(rng):
    params = make_params(num_entities=10, num_relations=3, dim=5)
    for _ in range(20):
        h, r, t = int(rng.integers(10)), int(rng.integers(3)), int(rng.integers(10))
        naive = sum(params.relation[r, i] * params.entity[h, i] * params.entity[t, i] for i in range(params.dim))
        assert plausibility(params, (h, r, t)) == pytest.approx(naive, abs=1e-12)


def test_out_of_range_ids():
    params = make_params(num_entities=3, num_relations=1)
    with pytest.raises(IndexError):
        plausibility(params, (3, 0, 0))
    with pytest.raises(IndexError):
        plausibility(params, (0, 1, 0))
    with pytest.raises(IndexError):
        tail_confidences(params, 0, 5)


def test_map_logistic_values():
    assert map_logistic(0.0, 1.0, 0.0) == 0.5
    assert map_logistic(1.0, 2.0, -1.0) == pytest.approx(1.0 / (1.0 + math.exp(-1.0)), abs=1e-15)
    assert map_logistic(1e6, 1.0, 0.0) == 1.0
    assert map_logistic(-1e6, 1.0, 0.0) < 1e-300
    assert 0.7310 < map_logistic(1.0, 2.0, -1.0) < 0.7312


def test_map_logistic_saturates():
    out = map_logistic(np.array([-1e300, 1e300]), 1.0, 0.0)
    assert np.all(np.isfinite(out))
    assert out[0] == pytest.approx(0.0) and out[1] == pytest.approx(1.0)


def test_map_rectifier_values():
    assert map_rectifier(0.5, 1.0, 0.0) == 0.5
    assert map_rectifier(5.0, 1.0, 0.0) == 1.0
    assert map_rectifier(-0.2, 2.0, 0.1) == 0.0


def test_confidence_on_zero_vector():
    entity = [[0.0, 0.0], [1.0, 1.0]]
    relation = [[1.0, 1.0]]
    assert confidence(_params(entity, relation, Variant.LOGISTIC), (0, 0, 1)) == 0.5
    assert confidence(_params(entity, relation, Variant.RECTIFIER), (0, 0, 1)) == 0.0


@pytest.mark.parametrize("variant", list(Variant))
def test_confidence_is_map_of_plausibility(variant, rng):
    params = make_params(num_entities=8, num_relations=2, dim=6, variant=variant)
    triples = np.column_stack([rng.integers(8, size=50), rng.integers(2, size=50), rng.integers(8, size=50)])
    batch = confidence_batch(params, triples)
    for row, value in zip(triples.tolist(), batch):
        g = plausibility(params, tuple(row))
        expected = map_logistic(g, params.w, params.b) if variant == Variant.LOGISTIC else map_rectifier(g, params.w, params.b)
        assert value == pytest.approx(float(expected), abs=1e-12)
        assert confidence(params, tuple(row)) == pytest.approx(value, abs=1e-12)
    assert np.all((batch >= 0.0) & (batch <= 1.0))


def test_confidence_is_monotone_in_plausibility():
    g = np.linspace(-5, 5, 101)
    for fn in (map_logistic, map_rectifier):
        out = fn(g, 0.7, 0.2)
        assert np.all(np.diff(out) >= 0)


def test_tail_confidences_match_batch():
    params = make_params(num_entities=7, num_relations=2, dim=3)
    tails = tail_confidences(params, 2, 1)
    triples = np.array([(2, 1, e) for e in range(7)])
    assert np.allclose(tails, confidence_batch(params, triples), rtol=0, atol=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        _params([[1.0, 2.0]], [[1.0]])
    with pytest.raises(ValueError):
        _params([[np.nan, 1.0]], [[1.0, 1.0]])


def test_snapshot_is_independent():
    params = make_params()
    snap = params.snapshot()
    params.entity[0, 0] += 1.0
    assert snap.entity[0, 0] != params.entity[0, 0]


def test_init_scale():
    params = make_params(num_entities=200, num_relations=50, dim=16)
    bound = 6.0 / math.sqrt(16)
    assert np.abs(params.entity).max() <= bound
    assert params.entity.min() < 0.0
    assert params.w == 1.0 and params.b == 0.0


def test_rectifier_init_starts_on_the_slope():
    params = make_params(num_entities=200, num_relations=50, dim=32, variant=Variant.RECTIFIER)
    assert params.entity.min() >= 0.0
    assert rectifier_init_bound(32) == pytest.approx(0.5)
    assert params.entity.max() <= rectifier_init_bound(32)
    assert params.w == 1.0 and params.b == 0.0
    rng = np.random.default_rng(0)
    triples = np.stack([rng.integers(200, size=500), rng.integers(50, size=500), rng.integers(200, size=500)], axis=1)
    g = plausibility_batch(params, triples)
    assert np.mean(g) == pytest.approx(0.5, abs=0.05)
    assert np.all(g > 0.0)
    assert np.mean(g < 1.0) >= 0.99
