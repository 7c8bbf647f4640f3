"""
Rule Grounding
--------------
Instantiates bound rules against a fact index so that a given unseen triple is
the rule head. Body atoms may only bind to observed strong facts (score > tau),
and body values are precomputed constants:

    body_value = max(0, s1 + s2 - 1)
"""

import threading
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from ukge.core.logger import get_logger
from ukge.core.schema import TripleKey, WeightedTriple
from ukge.ingestion.index import FactIndex
from ukge.reasoning.logic import luk_and
from ukge.reasoning.rules import BoundRule

logger = get_logger(__name__)


class GroundRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    body_facts: Tuple[WeightedTriple, WeightedTriple]
    head: TripleKey
    body_value: float
    rule_id: str
    weight: float


def _body_candidates(rule: BoundRule, position: int, endpoint: int, index: FactIndex) -> Dict[int, float]:
    """Middle-entity candidates for one body atom, mapped to the fact score."""
    relation = rule.body_relations[position]
    if rule.middle_is_subject[position]:
        # (M, r, endpoint)
        return index.strong_in.get((relation, endpoint), {})
    # (endpoint, r, M)
    return index.strong_out.get((endpoint, relation), {})


def _fact(rule: BoundRule, position: int, endpoint: int, middle: int, score: float) -> WeightedTriple:
    relation = rule.body_relations[position]
    if rule.middle_is_subject[position]:
        return WeightedTriple(head=middle, relation=relation, tail=endpoint, score=score)
    return WeightedTriple(head=endpoint, relation=relation, tail=middle, score=score)


def ground_for_head(rule: BoundRule, head: TripleKey, index: FactIndex) -> List[GroundRule]:
    """
    All groundings of rule whose head equals the given triple, one per middle entity.

    A relation mismatch yields an empty list. Groundings that would use the same
    fact for both body atoms are not produced.
    """
    h, r, t = head
    if r != rule.head_relation:
        return []

    head_values = (h, t)
    endpoints = (head_values[rule.endpoint_slot[0]], head_values[rule.endpoint_slot[1]])
    first = _body_candidates(rule, 0, endpoints[0], index)
    if not first:
        return []
    second = _body_candidates(rule, 1, endpoints[1], index)
    if not second:
        return []

    grounded: List[GroundRule] = []
    for middle in sorted(first.keys() & second.keys()):
        s1, s2 = first[middle], second[middle]
        fact1 = _fact(rule, 0, endpoints[0], middle, s1)
        fact2 = _fact(rule, 1, endpoints[1], middle, s2)
        if fact1.key == fact2.key:
            continue
        grounded.append(GroundRule(
            body_facts=(fact1, fact2),
            head=(h, r, t),
            body_value=luk_and(s1, s2),
            rule_id=rule.id,
            weight=rule.weight,
        ))
    return grounded


@dataclass
class GroundingTerms:
    """Flat per-ground-rule arrays for a batch of heads."""
    owner: np.ndarray        # index into the batch of heads
    body_value: np.ndarray
    weight: np.ndarray

    @classmethod
    def empty(cls) -> "GroundingTerms":
        return cls(np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0))

    def __len__(self) -> int:
        return int(self.owner.shape[0])


class Grounder:
    """
    Grounds every rule against a fixed index, memoizing by (rule id, h, t).

    Unseen heads repeat across epochs, so the cache keeps grounding cost
    proportional to the number of distinct heads. Safe for concurrent callers.
    """

    def __init__(self, rules: Sequence[BoundRule], index: FactIndex):
        self.rules = list(rules)
        self.index = index
        self._by_head_relation: Dict[int, List[BoundRule]] = {}
        for rule in self.rules:
            self._by_head_relation.setdefault(rule.head_relation, []).append(rule)
        self._cache: Dict[Tuple[str, int, int], Tuple[GroundRule, ...]] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def ground(self, head: TripleKey) -> List[GroundRule]:
        h, r, t = head
        grounded: List[GroundRule] = []
        for rule in self._by_head_relation.get(r, ()):
            key = (rule.id, h, t)
            with self._lock:
                cached = self._cache.get(key)
                if cached is not None:
                    self.hits += 1
            if cached is None:
                cached = tuple(ground_for_head(rule, (h, r, t), self.index))
                with self._lock:
                    self._cache.setdefault(key, cached)
                    self.misses += 1
            grounded.extend(cached)
        return grounded

    def ground_batch(self, heads: np.ndarray) -> GroundingTerms:
        owners: List[int] = []
        bodies: List[float] = []
        weights: List[float] = []
        for i, (h, r, t) in enumerate(np.asarray(heads, dtype=np.int64).reshape(-1, 3).tolist()):
            if r not in self._by_head_relation:
                continue
            for g in self.ground((h, r, t)):
                owners.append(i)
                bodies.append(g.body_value)
                weights.append(g.weight)
        if not owners:
            return GroundingTerms.empty()
        return GroundingTerms(
            owner=np.asarray(owners, dtype=np.int64),
            body_value=np.asarray(bodies, dtype=np.float64),
            weight=np.asarray(weights, dtype=np.float64),
        )

    @property
    def cache_size(self) -> int:
        with self._lock:
            return len(self._cache)
