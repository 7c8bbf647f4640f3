from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from conftest import triple
from ukge.core.errors import SplitError
from ukge.ingestion.index import FactIndex
from ukge.ingestion.split import SamplingStats, sample_negatives, split_dataset


def _kg(n: int, num_entities: int = 40, seed: int = 0):
    rng = np.random.default_rng(seed)
    seen, out = set(), []
    while len(out) < n:
        h, t = (int(x) for x in rng.integers(num_entities, size=2))
        r = int(rng.integers(3))
        if (h, r, t) in seen:
            continue
        seen.add((h, r, t))
        out.append(triple(h, r, t, float(rng.uniform(0.1, 1.0))))
    return out


def test_split_sizes_and_negatives():
    split = split_dataset(_kg(100), seed=7, num_entities=40)
    assert (len(split.train), len(split.validation), len(split.test)) == (85, 7, 8)
    assert len(split.test_negatives) == 8
    assert all(t.score == 0.0 for t in split.test_negatives)


def test_split_is_a_partition():
    facts = _kg(100)
    split = split_dataset(facts, seed=1, num_entities=40)
    keys = [t.key for t in split.all_observed()]
    assert len(keys) == len(set(keys))
    assert set(keys) == {t.key for t in facts}


def test_negatives_are_unseen_and_distinct():
    facts = _kg(200)
    split = split_dataset(facts, seed=3, num_entities=40)
    observed = {t.key for t in facts}
    negatives = [t.key for t in split.test_negatives]
    assert len(negatives) == len(set(negatives))
    assert not observed & set(negatives)


def test_split_determinism():
    facts = _kg(100)
    a = split_dataset(facts, seed=11, num_entities=40)
    b = split_dataset(facts, seed=11, num_entities=40)
    assert a == b
    c = split_dataset(facts, seed=12, num_entities=40)
    assert {t.key for t in a.train} != {t.key for t in c.train}


def test_tied_rounding_keeps_a_partition():
    facts = _kg(3)
    split = split_dataset(facts, ratios=(0.0, 0.5, 0.5), num_entities=40)
    assert (len(split.train), len(split.validation), len(split.test)) == (0, 2, 1)
    keys = [t.key for t in split.all_observed()]
    assert sorted(keys) == sorted(t.key for t in facts)


@pytest.mark.parametrize("n", [7, 11, 23, 50])
@pytest.mark.parametrize("ratios", [(0.34, 0.33, 0.33), (0.2, 0.45, 0.35), (0.5, 0.25, 0.25)])
def test_split_sizes_always_sum_to_input(n, ratios):
    facts = _kg(n)
    split = split_dataset(facts, ratios=ratios, num_entities=40)
    keys = [t.key for t in split.all_observed()]
    assert len(keys) == n
    assert sorted(keys) == sorted(t.key for t in facts)


def test_degenerate_ratios_leave_empty_splits():
    split = split_dataset(_kg(10), ratios=(1.0, 0.0, 0.0), num_entities=40)
    assert len(split.train) == 10
    assert split.validation == [] and split.test == [] and split.test_negatives == []


def test_split_errors():
    with pytest.raises(SplitError):
        split_dataset(_kg(5), num_entities=40)
    with pytest.raises(SplitError):
        split_dataset(_kg(100), ratios=(0.5, 0.2, 0.2), num_entities=40)
    duplicated = _kg(50)
    with pytest.raises(SplitError):
        split_dataset(duplicated + duplicated[:1], num_entities=40)


def test_sample_negatives_alternates_slots(rng):
    positive = triple(0, 0, 1, 0.9)
    index = FactIndex.build([positive], tau=0.85, num_entities=10)
    out = sample_negatives([positive], 2, index, rng)
    assert out.shape == (2, 3)
    head_corrupted, tail_corrupted = out.tolist()
    assert head_corrupted[1:] == [0, 1] and head_corrupted[0] != 0
    assert tail_corrupted[:2] == [0, 0] and tail_corrupted[2] != 1


def test_sample_negatives_on_saturated_graph_skips(rng):
    facts = [triple(h, 0, t, 1.0) for h in range(3) for t in range(3)]
    index = FactIndex.build(facts, tau=0.85, num_entities=3)
    stats = SamplingStats()
    out = sample_negatives(facts[:4], 2, index, rng, stats)
    assert out.shape == (0, 3)
    assert stats.skipped == 8 and stats.emitted == 0


def test_sampled_negatives_are_never_observed(rng):
    facts = _kg(150, num_entities=20)
    index = FactIndex.build(facts, tau=0.85)
    out = sample_negatives(facts, 3, index, rng)
    assert all(tuple(row) not in index for row in out.tolist())


def test_corrupted_entity_is_uniform():
    positive = triple(0, 0, 0, 1.0)
    index = FactIndex.build([positive], tau=0.85, num_entities=5)
    rng = np.random.default_rng(99)
    out = sample_negatives([positive] * 5000, 2, index, rng)
    # tail corruptions never produce (0, 0, 0), so the tail is uniform over 1..4
    tails = Counter(out[1::2, 2].tolist())
    observed = [tails[e] for e in range(1, 5)]
    assert sum(observed) == 5000
    assert chisquare(observed).pvalue > 0.01
