"""
Synthetic Uncertain KG
----------------------
Samples a latent bilinear model with a logistic confidence map and emits
distinct facts scored by it. Optionally plants a transitive relation:
disjoint chains (a, T, b) & (b, T, c) with strong bodies, and the implied fact
(a, T, c) scored luk_and(s1, s2). A fraction of the implied facts is held out
so rule-driven propagation can be measured on facts the model never saw.
"""

from dataclasses import dataclass
from typing import List, Optional, Set

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.special import expit

from ukge.core.errors import DataError
from ukge.core.logger import get_logger
from ukge.core.schema import TripleKey, WeightedTriple
from ukge.ingestion.parser import Vocabulary
from ukge.reasoning.logic import luk_and
from ukge.reasoning.rules import Atom, LogicalRule

logger = get_logger(__name__)

MAX_DRAWS_PER_FACT = 50


class SyntheticConfig(BaseModel):
    num_entities: int = Field(default=60, ge=2)
    num_relations: int = Field(default=3, ge=1)
    num_facts: int = Field(default=200, ge=0)
    latent_dim: int = Field(default=8, ge=1)
    # slope of the latent logistic map; larger values push confidences to 0/1
    sharpness: float = Field(default=4.0, gt=0.0)
    seed: int = 0

    plant_transitive: bool = False
    transitive_relation: str = "linked_to"
    num_chains: int = Field(default=10, ge=0)
    min_body_score: float = Field(default=0.93, gt=0.0, le=1.0)
    holdout_fraction: float = Field(default=0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_chain_room(self) -> "SyntheticConfig":
        if self.plant_transitive and 3 * self.num_chains > self.num_entities:
            raise ValueError(
                f"{self.num_chains} disjoint chains need {3 * self.num_chains} entities, "
                f"only {self.num_entities} configured"
            )
        return self


@dataclass
class SyntheticKG:
    vocab: Vocabulary
    facts: List[WeightedTriple]
    heldout: List[WeightedTriple]
    rule: Optional[LogicalRule] = None


def planted_rule(relation: str) -> LogicalRule:
    return LogicalRule(
        id="planted",
        body=(Atom(subject="A", relation=relation, object="B"), Atom(subject="B", relation=relation, object="C")),
        head=Atom(subject="A", relation=relation, object="C"),
    )


def generate_synthetic(config: SyntheticConfig) -> SyntheticKG:
    rng = np.random.default_rng(config.seed)
    vocab = Vocabulary(
        entities=[f"e{i}" for i in range(config.num_entities)],
        relations=[f"r{i}" for i in range(config.num_relations)],
    )

    scale = 1.0 / np.sqrt(config.latent_dim)
    entity = rng.normal(0.0, scale, size=(config.num_entities, config.latent_dim))
    relation = rng.normal(0.0, 1.0, size=(config.num_relations, config.latent_dim))

    seen: Set[TripleKey] = set()
    facts: List[WeightedTriple] = []
    draws = 0
    budget = MAX_DRAWS_PER_FACT * max(1, config.num_facts)
    while len(facts) < config.num_facts:
        draws += 1
        if draws > budget:
            raise DataError(
                f"could only place {len(facts)} of {config.num_facts} distinct facts; the graph is too small"
            )
        h, t = (int(x) for x in rng.choice(config.num_entities, size=2, replace=False))
        r = int(rng.integers(config.num_relations))
        if (h, r, t) in seen:
            continue
        g = float(np.sum(entity[h] * relation[r] * entity[t]))
        score = float(expit(config.sharpness * g))
        seen.add((h, r, t))
        facts.append(WeightedTriple(head=h, relation=r, tail=t, score=score))

    heldout: List[WeightedTriple] = []
    rule = None
    if config.plant_transitive and config.num_chains > 0:
        rid = vocab.add_relation(config.transitive_relation)
        rule = planted_rule(config.transitive_relation)
        chain_entities = rng.permutation(config.num_entities)[: 3 * config.num_chains].reshape(-1, 3)
        implied: List[WeightedTriple] = []
        for a, b, c in chain_entities.tolist():
            s1, s2 = (float(x) for x in rng.uniform(config.min_body_score, 1.0, size=2))
            facts.append(WeightedTriple(head=a, relation=rid, tail=b, score=s1))
            facts.append(WeightedTriple(head=b, relation=rid, tail=c, score=s2))
            implied.append(WeightedTriple(head=a, relation=rid, tail=c, score=luk_and(s1, s2)))

        n_heldout = int(round(config.holdout_fraction * len(implied)))
        order = rng.permutation(len(implied))
        heldout = [implied[i] for i in sorted(order[:n_heldout])]
        facts.extend(implied[i] for i in sorted(order[n_heldout:]))

    logger.info(
        f"[SYNTH] seed={config.seed} | entities={vocab.num_entities} | relations={vocab.num_relations} "
        f"| facts={len(facts)} | heldout={len(heldout)} | planted={rule is not None}"
    )
    return SyntheticKG(vocab=vocab, facts=facts, heldout=heldout, rule=rule)
