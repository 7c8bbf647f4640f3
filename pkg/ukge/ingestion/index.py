from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

from ukge.core.schema import TripleKey, WeightedTriple


class FactIndex:
    """
    Lookup structures over a set of observed facts.

    exact and by_head_relation always hold the same triples. The strong_* maps
    hold only facts with score > tau; they feed rule grounding and mining.
    The index is not mutated after build().
    """

    def __init__(
        self,
        tau: float,
        exact: FrozenSet[TripleKey],
        by_head_relation: Mapping[Tuple[int, int], Mapping[int, float]],
        strong_by_relation: Mapping[int, List[Tuple[int, int, float]]],
        strong_out: Mapping[Tuple[int, int], Mapping[int, float]],
        strong_in: Mapping[Tuple[int, int], Mapping[int, float]],
        relations_between: Mapping[Tuple[int, int], FrozenSet[int]],
        num_entities: int,
    ):
        self.tau = tau
        self.exact = exact
        self.by_head_relation = by_head_relation
        self.strong_by_relation = strong_by_relation
        self.strong_out = strong_out
        self.strong_in = strong_in
        self.relations_between = relations_between
        self.num_entities = num_entities

    @classmethod
    def build(cls, triples: Iterable[WeightedTriple], tau: float, num_entities: Optional[int] = None) -> "FactIndex":
        by_hr: Dict[Tuple[int, int], Dict[int, float]] = defaultdict(dict)
        strong_by_r: Dict[int, List[Tuple[int, int, float]]] = defaultdict(list)
        strong_out: Dict[Tuple[int, int], Dict[int, float]] = defaultdict(dict)
        strong_in: Dict[Tuple[int, int], Dict[int, float]] = defaultdict(dict)
        between: Dict[Tuple[int, int], Set[int]] = defaultdict(set)
        max_entity = -1

        for t in triples:
            by_hr[(t.head, t.relation)][t.tail] = t.score
            between[(t.head, t.tail)].add(t.relation)
            max_entity = max(max_entity, t.head, t.tail)

        # second pass over the deduplicated view so strong maps agree with exact lookup
        for (h, r), tails in by_hr.items():
            for tail, score in tails.items():
                if score > tau:
                    strong_by_r[r].append((h, tail, score))
                    strong_out[(h, r)][tail] = score
                    strong_in[(r, tail)][h] = score

        for r in strong_by_r:
            strong_by_r[r].sort()

        exact = frozenset((h, r, t) for (h, r), tails in by_hr.items() for t in tails)
        return cls(
            tau=tau,
            exact=exact,
            by_head_relation=dict(by_hr),
            strong_by_relation=dict(strong_by_r),
            strong_out=dict(strong_out),
            strong_in=dict(strong_in),
            relations_between={k: frozenset(v) for k, v in between.items()},
            num_entities=num_entities if num_entities is not None else max_entity + 1,
        )

    def __contains__(self, key: TripleKey) -> bool:
        return key in self.exact

    def __len__(self) -> int:
        return len(self.exact)

    def score(self, head: int, relation: int, tail: int) -> Optional[float]:
        return self.by_head_relation.get((head, relation), {}).get(tail)

    @property
    def relations(self) -> List[int]:
        return sorted({r for (_, r) in self.by_head_relation})

    def strong_facts(self) -> List[WeightedTriple]:
        return [
            WeightedTriple(head=h, relation=r, tail=t, score=s)
            for r in sorted(self.strong_by_relation)
            for (h, t, s) in self.strong_by_relation[r]
        ]
