"""
Triple File Parsing
-------------------
Reads and writes the line-oriented triple format:

    head<TAB>relation<TAB>tail<TAB>score

Lines starting with '#' and blank lines are ignored. Names are interned into a
Vocabulary on first sight, so ids are dense and follow file order.
"""

import hashlib
import math
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

from ukge.core.errors import TripleParseError
from ukge.core.logger import get_logger
from ukge.core.schema import ColumnSpec, TripleKey, WeightedTriple

logger = get_logger(__name__)


class Vocabulary:
    """Bidirectional name <-> dense id maps for entities and relations."""

    def __init__(self, entities: Sequence[str] = (), relations: Sequence[str] = ()):
        self._entity_index: Dict[str, int] = {}
        self._relation_index: Dict[str, int] = {}
        self._entities: List[str] = []
        self._relations: List[str] = []
        for name in entities:
            self.add_entity(name)
        for name in relations:
            self.add_relation(name)

    def add_entity(self, name: str) -> int:
        idx = self._entity_index.get(name)
        if idx is None:
            idx = len(self._entities)
            self._entity_index[name] = idx
            self._entities.append(name)
        return idx

    def add_relation(self, name: str) -> int:
        idx = self._relation_index.get(name)
        if idx is None:
            idx = len(self._relations)
            self._relation_index[name] = idx
            self._relations.append(name)
        return idx

    def entity_id(self, name: str) -> Optional[int]:
        return self._entity_index.get(name)

    def relation_id(self, name: str) -> Optional[int]:
        return self._relation_index.get(name)

    def entity_name(self, idx: int) -> str:
        return self._entities[idx]

    def relation_name(self, idx: int) -> str:
        return self._relations[idx]

    @property
    def entities(self) -> List[str]:
        return list(self._entities)

    @property
    def relations(self) -> List[str]:
        return list(self._relations)

    @property
    def num_entities(self) -> int:
        return len(self._entities)

    @property
    def num_relations(self) -> int:
        return len(self._relations)

    def entity_digest(self) -> str:
        return _digest(self._entities)

    def relation_digest(self) -> str:
        return _digest(self._relations)

    def digest(self) -> str:
        return hashlib.sha256(f"{self.entity_digest()}:{self.relation_digest()}".encode("utf-8")).hexdigest()

    def save(self, directory: Path) -> None:
        directory = Path(directory)
        (directory / "entities.txt").write_text("".join(f"{n}\n" for n in self._entities), encoding="utf-8")
        (directory / "relations.txt").write_text("".join(f"{n}\n" for n in self._relations), encoding="utf-8")

    @classmethod
    def load(cls, directory: Path) -> "Vocabulary":
        directory = Path(directory)
        entities = (directory / "entities.txt").read_text(encoding="utf-8").splitlines()
        relations = (directory / "relations.txt").read_text(encoding="utf-8").splitlines()
        return cls(entities, relations)


def _digest(names: Sequence[str]) -> str:
    h = hashlib.sha256()
    for name in names:
        h.update(name.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def parse_triples(
    source: Iterable[str],
    vocab: Vocabulary,
    schema: ColumnSpec = ColumnSpec(),
    source_name: Optional[str] = None,
) -> List[WeightedTriple]:
    """
    Parse triples with raw scores. Duplicate keys are kept; see deduplicate_triples.
    """
    triples: List[WeightedTriple] = []
    for line_number, raw_line in enumerate(source, start=1):
        line = raw_line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith(schema.comment_prefix):
            continue

        fields = line.split(schema.delimiter)
        if len(fields) < schema.min_fields:
            raise TripleParseError(
                f"expected at least {schema.min_fields} fields separated by {schema.delimiter!r}, got {len(fields)}",
                line_number, source_name,
            )

        head, relation, tail = (fields[schema.head].strip(), fields[schema.relation].strip(), fields[schema.tail].strip())
        if not head or not relation or not tail:
            raise TripleParseError("empty head, relation or tail", line_number, source_name)

        raw_score = fields[schema.score].strip()
        try:
            score = float(raw_score)
        except ValueError:
            raise TripleParseError(f"non-numeric score {raw_score!r}", line_number, source_name)
        if not math.isfinite(score):
            raise TripleParseError(f"non-finite score {raw_score!r}", line_number, source_name)

        triples.append(WeightedTriple(
            head=vocab.add_entity(head),
            relation=vocab.add_relation(relation),
            tail=vocab.add_entity(tail),
            score=score,
        ))
    return triples


def deduplicate_triples(triples: Sequence[WeightedTriple]) -> List[WeightedTriple]:
    """Keep the last occurrence of every (h, r, t) key, preserving first-seen order."""
    latest: Dict[TripleKey, WeightedTriple] = {}
    for triple in triples:
        previous = latest.get(triple.key)
        if previous is not None:
            logger.warning(
                f"[DEDUP] key={triple.key} | kept_score={triple.score} | dropped_score={previous.score}"
            )
        latest[triple.key] = triple
    return list(latest.values())


def serialize_triples(triples: Iterable[WeightedTriple], vocab: Vocabulary) -> str:
    lines = []
    for t in triples:
        lines.append(
            f"{vocab.entity_name(t.head)}\t{vocab.relation_name(t.relation)}\t"
            f"{vocab.entity_name(t.tail)}\t{float(t.score)!r}\n"
        )
    return "".join(lines)


def _decoded_lines(raw_lines: Iterable[bytes], source_name: str) -> Iterator[str]:
    for line_number, raw_line in enumerate(raw_lines, start=1):
        try:
            yield raw_line.decode("utf-8")
        except UnicodeDecodeError as e:
            raise TripleParseError(f"invalid UTF-8 at byte {e.start}", line_number, source_name)


def read_triples(path: Path, vocab: Vocabulary, schema: ColumnSpec = ColumnSpec()) -> List[WeightedTriple]:
    path = Path(path)
    with open(path, "rb") as f:
        return parse_triples(_decoded_lines(f, str(path)), vocab, schema, source_name=str(path))


def write_triples(path: Path, triples: Iterable[WeightedTriple], vocab: Vocabulary) -> None:
    # newline="" so the file bytes are identical on every platform
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(serialize_triples(triples, vocab))
