import numpy as np
import pytest

from conftest import triple
from ukge.ingestion.index import FactIndex
from ukge.ingestion.parser import Vocabulary
from ukge.reasoning.grounding import Grounder, ground_for_head
from ukge.reasoning.rules import bind_rules, read_rules

TAU = 0.85


@pytest.fixture
def synonym_setup(synonym_kg, fixtures_dir):
    vocab, triples = synonym_kg
    rules = bind_rules(read_rules(fixtures_dir / "synonym.rules", vocab), vocab)
    index = FactIndex.build(triples, tau=TAU, num_entities=vocab.num_entities)
    return vocab, rules, index


def _key(vocab, h, r, t):
    return (vocab.entity_id(h), vocab.relation_id(r), vocab.entity_id(t))


def test_transitive_grounding(synonym_setup):
    vocab, (transitive, _), index = synonym_setup
    head = _key(vocab, "college", "synonym", "institute")
    (ground,) = ground_for_head(transitive, head, index)
    assert ground.body_value == pytest.approx(0.85, abs=1e-12)
    assert ground.head == head
    assert [f.score for f in ground.body_facts] == [0.99, 0.86]
    assert ground.rule_id == "rule1" and ground.weight == 1.0


def test_weak_body_fact_blocks_grounding(synonym_setup):
    vocab, (transitive, _), index = synonym_setup
    # college -> school is 0.7, below the strong threshold
    assert ground_for_head(transitive, _key(vocab, "college", "synonym", "academy"), index) == []


def test_relation_mismatch_yields_nothing(synonym_setup):
    vocab, (transitive, _), index = synonym_setup
    assert ground_for_head(transitive, _key(vocab, "college", "related_to", "institute"), index) == []


def test_shared_object_grounding(synonym_setup):
    vocab, (_, shared), index = synonym_setup
    (ground,) = ground_for_head(shared, _key(vocab, "college", "synonym", "university"), index)
    assert ground.body_value == pytest.approx(0.78, abs=1e-12)
    assert ground.weight == 0.5


def test_same_fact_twice_is_not_a_grounding(synonym_setup):
    vocab, (_, shared), index = synonym_setup
    assert ground_for_head(shared, _key(vocab, "college", "synonym", "college"), index) == []


def test_one_grounding_per_middle(fixtures_dir):
    vocab = Vocabulary(["a", "m1", "m2", "c"], ["synonym", "related_to"])
    rules = bind_rules(read_rules(fixtures_dir / "synonym.rules", vocab), vocab)
    facts = [triple(0, 0, 1, 0.9), triple(1, 0, 3, 0.95), triple(0, 0, 2, 1.0), triple(2, 0, 3, 0.9)]
    index = FactIndex.build(facts, tau=TAU, num_entities=4)
    grounded = ground_for_head(rules[0], (0, 0, 3), index)
    assert len(grounded) == 2
    assert sorted(g.body_value for g in grounded) == pytest.approx([0.85, 0.9])


def test_grounder_caches_per_head(synonym_setup):
    vocab, rules, index = synonym_setup
    grounder = Grounder(rules, index)
    head = _key(vocab, "college", "synonym", "institute")
    first = grounder.ground(head)
    assert grounder.misses == 2 and grounder.hits == 0
    assert grounder.ground(head) == first
    assert grounder.hits == 2 and grounder.cache_size == 2


def test_ground_batch_flattens_terms(synonym_setup):
    vocab, rules, index = synonym_setup
    heads = np.array([
        _key(vocab, "campus", "related_to", "college"),
        _key(vocab, "college", "synonym", "institute"),
        _key(vocab, "university", "synonym", "college"),
    ])
    terms = Grounder(rules, index).ground_batch(heads)
    assert terms.owner.tolist() == [1, 2]
    assert terms.body_value.tolist() == pytest.approx([0.85, 0.78])
    assert terms.weight.tolist() == [1.0, 0.5]


def test_ground_batch_without_rules_is_empty(synonym_setup):
    _, _, index = synonym_setup
    terms = Grounder([], index).ground_batch(np.array([[0, 0, 1]]))
    assert len(terms) == 0
