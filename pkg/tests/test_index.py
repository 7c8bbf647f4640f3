from conftest import triple
from ukge.ingestion.index import FactIndex

TAU = 0.85


def _index():
    facts = [
        triple(2, 1, 3, 0.9),
        triple(0, 0, 1, 0.95),
        triple(0, 0, 2, 0.85),
        triple(1, 1, 0, 0.2),
        triple(4, 0, 0, 0.99),
    ]
    return FactIndex.build(facts, tau=TAU)


def test_lookup_and_membership():
    index = _index()
    assert len(index) == 5
    assert (0, 0, 1) in index and (1, 0, 0) not in index
    assert index.score(1, 1, 0) == 0.2
    assert index.score(1, 0, 0) is None
    assert index.relations == [0, 1]
    assert index.num_entities == 5


def test_strong_facts_are_strictly_above_tau():
    index = _index()
    keys = [t.key for t in index.strong_facts()]
    # 0.85 is not strong; order is by relation, then head, then tail
    assert keys == [(0, 0, 1), (4, 0, 0), (2, 1, 3)]
    assert index.strong_out[(0, 0)] == {1: 0.95}
    assert index.strong_in[(0, 0)] == {4: 0.99}


def test_strong_maps_follow_the_deduplicated_score():
    index = FactIndex.build([triple(0, 0, 1, 0.95), triple(0, 0, 1, 0.3)], tau=TAU)
    assert len(index) == 1
    assert index.score(0, 0, 1) == 0.3
    assert index.strong_facts() == []
