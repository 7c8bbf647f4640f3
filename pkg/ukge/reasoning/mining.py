"""
Rule Mining
-----------
Proposes length-2 rules from strong facts and scores them by hit ratio: the
share of body groundings whose implied head fact is already observed.

Two body shapes are enumerated:
    path            (A, r1, B) & (B, r2, C) => (A, r3, C)
    shared subject  (A, r1, B) & (A, r2, C) => (B, r3, C)
"""

from collections import Counter, defaultdict
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, Field

from ukge.core.logger import get_logger
from ukge.ingestion.index import FactIndex
from ukge.ingestion.parser import Vocabulary
from ukge.reasoning.rules import Atom, LogicalRule, format_rule

logger = get_logger(__name__)

DEFAULT_MAX_PATHS = 100_000

PATH = "path"
SHARED_SUBJECT = "shared-subject"


class MinedRuleReport(BaseModel):
    rule: LogicalRule
    hit_ratio: float = Field(..., ge=0.0, le=1.0)
    support: int = Field(..., ge=1)
    hits: int = Field(..., ge=0)
    # True when enumeration hit the per-pair cap and the ratio is a sample estimate
    estimated: bool = False


def _strong_by_head(index: FactIndex) -> Dict[int, List[Tuple[int, int]]]:
    out: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for fact in index.strong_facts():
        out[fact.head].append((fact.relation, fact.tail))
    for h in out:
        out[h].sort()
    return out


def _enumerate_paths(
    index: FactIndex, max_paths: int
) -> Tuple[Dict[Tuple[str, int, int], List[Tuple[int, int]]], Dict[Tuple[str, int, int], bool]]:
    """Endpoint pairs of every strong length-2 body, grouped by (shape, r1, r2)."""
    by_head = _strong_by_head(index)
    groups: Dict[Tuple[str, int, int], List[Tuple[int, int]]] = defaultdict(list)
    truncated: Dict[Tuple[str, int, int], bool] = defaultdict(bool)

    def add(key: Tuple[str, int, int], endpoints: Tuple[int, int]) -> None:
        bucket = groups[key]
        if len(bucket) >= max_paths:
            truncated[key] = True
            return
        bucket.append(endpoints)

    for a in sorted(by_head):
        facts = by_head[a]
        for r1, m in facts:
            # path: (a, r1, m) & (m, r2, c)
            for r2, c in by_head.get(m, ()):
                if (a, r1, m) == (m, r2, c):
                    continue
                add((PATH, r1, r2), (a, c))
        # shared subject: (a, r1, b) & (a, r2, c)
        for r1, b in facts:
            for r2, c in facts:
                if (r1, b) == (r2, c):
                    continue
                add((SHARED_SUBJECT, r1, r2), (b, c))
    return groups, truncated


def _candidate_rule(shape: str, r1: str, r2: str, r3: str, weight: float = 1.0) -> LogicalRule:
    if shape == PATH:
        body = (Atom(subject="A", relation=r1, object="B"), Atom(subject="B", relation=r2, object="C"))
        head = Atom(subject="A", relation=r3, object="C")
    else:
        body = (Atom(subject="A", relation=r1, object="B"), Atom(subject="A", relation=r2, object="C"))
        head = Atom(subject="B", relation=r3, object="C")
    return LogicalRule(id="candidate", body=body, head=head, weight=weight)


def mine_rules(
    index: FactIndex,
    vocab: Vocabulary,
    min_hit_ratio: float = 0.0,
    min_support: int = 1,
    max_paths_per_pair: int = DEFAULT_MAX_PATHS,
) -> List[MinedRuleReport]:
    """
    Enumerate (r1, r2, r3) candidates with at least one strong body grounding,
    keep those meeting both thresholds, sorted by hit ratio (descending).
    """
    if not 0.0 <= min_hit_ratio <= 1.0:
        raise ValueError(f"min_hit_ratio must lie in [0, 1], got {min_hit_ratio}")
    min_support = max(1, int(min_support))

    groups, truncated = _enumerate_paths(index, max_paths_per_pair)
    relations = index.relations

    scored = []
    for (shape, r1, r2), endpoints in groups.items():
        support = len(endpoints)
        if support < min_support:
            continue
        hits = Counter()
        for pair in endpoints:
            hits.update(index.relations_between.get(pair, ()))
        for r3 in relations:
            ratio = hits[r3] / support
            if ratio < min_hit_ratio:
                continue
            rule = _candidate_rule(
                shape, vocab.relation_name(r1), vocab.relation_name(r2), vocab.relation_name(r3)
            )
            scored.append((rule, ratio, support, hits[r3], truncated[(shape, r1, r2)]))

    scored.sort(key=lambda item: (-item[1], -item[2], format_rule(item[0])))
    reports = [
        MinedRuleReport(
            rule=rule.model_copy(update={"id": f"mined{i + 1}"}),
            hit_ratio=ratio,
            support=support,
            hits=hit_count,
            estimated=estimated,
        )
        for i, (rule, ratio, support, hit_count, estimated) in enumerate(scored)
    ]
    logger.info(
        f"[MINE] body_groups={len(groups)} | candidates={len(reports)} "
        f"| min_hit_ratio={min_hit_ratio} | min_support={min_support}"
    )
    return reports


def reports_to_frame(reports: Sequence[MinedRuleReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "rule": format_rule(r.rule),
                "support": r.support,
                "hits": r.hits,
                "hit_ratio": r.hit_ratio,
                "estimated": r.estimated,
            }
            for r in reports
        ],
        columns=["rule", "support", "hits", "hit_ratio", "estimated"],
    )


def write_report(path: Path, reports: Sequence[MinedRuleReport]) -> None:
    reports_to_frame(reports).to_csv(path, sep="\t", index=False, lineterminator="\n")
