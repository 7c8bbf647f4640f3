import pytest
from pydantic import ValidationError

from ukge.core.errors import DataError
from ukge.ingestion.synthetic import SyntheticConfig, generate_synthetic
from ukge.reasoning.logic import luk_and
from ukge.reasoning.rules import format_rule


def test_generator_is_deterministic():
    a = generate_synthetic(SyntheticConfig(seed=5))
    b = generate_synthetic(SyntheticConfig(seed=5))
    assert a.facts == b.facts
    assert a.facts != generate_synthetic(SyntheticConfig(seed=6)).facts


def test_facts_are_distinct_and_scored():
    kg = generate_synthetic(SyntheticConfig(num_facts=150))
    keys = [t.key for t in kg.facts]
    assert len(keys) == len(set(keys)) == 150
    assert all(0.0 < t.score < 1.0 for t in kg.facts)
    assert all(t.head != t.tail for t in kg.facts)
    assert kg.heldout == [] and kg.rule is None


def test_planted_transitive_chains():
    config = SyntheticConfig(plant_transitive=True, num_chains=10, holdout_fraction=0.5, seed=3)
    kg = generate_synthetic(config)
    transitive = kg.vocab.relation_id("linked_to")
    assert transitive == 3
    assert format_rule(kg.rule) == "(A, linked_to, B) & (B, linked_to, C) => (A, linked_to, C) : 1.0"
    assert len(kg.heldout) == 5
    assert len(kg.facts) == 200 + 20 + 5

    linked = {t.key: t.score for t in kg.facts if t.relation == transitive}
    observed = {t.key for t in kg.facts}
    for fact in kg.heldout:
        assert fact.key not in observed
        (middle,) = [t for (h, _, t) in linked if h == fact.head and (t, transitive, fact.tail) in linked]
        s1 = linked[(fact.head, transitive, middle)]
        s2 = linked[(middle, transitive, fact.tail)]
        assert min(s1, s2) >= 0.93
        assert fact.score == pytest.approx(luk_and(s1, s2))


def test_too_many_chains_is_rejected():
    with pytest.raises(ValidationError):
        SyntheticConfig(num_entities=20, plant_transitive=True, num_chains=7)


def test_impossible_fact_count_raises():
    with pytest.raises(DataError):
        generate_synthetic(SyntheticConfig(num_entities=2, num_relations=1, num_facts=5))
