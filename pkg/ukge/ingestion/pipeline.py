"""
Ingestion Pipeline
------------------
raw triple file -> parse -> normalize -> deduplicate -> split -> split directory

The split directory is self-describing:

    train.tsv  valid.tsv  test.tsv  test_negatives.tsv
    entities.txt  relations.txt  metadata.json

Everything is written with fixed ordering and no timestamps, so the same input
and seed reproduce the same bytes.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, ValidationError

from ukge.core.errors import DataError, VocabularyMismatchError
from ukge.core.logger import get_logger
from ukge.core.schema import ColumnSpec, NormalizationSpec, WeightedTriple
from ukge.ingestion.normalize import normalize_scores
from ukge.ingestion.parser import Vocabulary, deduplicate_triples, read_triples, write_triples
from ukge.ingestion.split import DEFAULT_RATIOS, DatasetSplit, split_dataset

logger = get_logger(__name__)

DEFAULT_TAU = 0.85
SPLIT_FORMAT_VERSION = 1

SPLIT_FILES = {
    "train": "train.tsv",
    "validation": "valid.tsv",
    "test": "test.tsv",
    "test_negatives": "test_negatives.tsv",
}
METADATA_FILE = "metadata.json"


class SplitMetadata(BaseModel):
    format_version: int = SPLIT_FORMAT_VERSION
    source: Optional[str] = None
    seed: int
    ratios: Tuple[float, float, float]
    tau: float = Field(default=DEFAULT_TAU, ge=0.0, le=1.0)
    normalization: NormalizationSpec
    counts: Dict[str, int]
    entity_digest: str
    relation_digest: str


@dataclass
class LoadedSplit:
    split: DatasetSplit
    vocab: Vocabulary
    metadata: SplitMetadata

    @property
    def tau(self) -> float:
        return self.metadata.tau


def prepare_triples(
    path: Path,
    normalization: NormalizationSpec = NormalizationSpec(),
    schema: ColumnSpec = ColumnSpec(),
    vocab: Optional[Vocabulary] = None,
) -> Tuple[List[WeightedTriple], Vocabulary]:
    """Parse, normalize and deduplicate one triple file."""
    vocab = vocab if vocab is not None else Vocabulary()
    raw = read_triples(path, vocab, schema)
    normalized = normalize_scores(raw, normalization)
    unique = deduplicate_triples(normalized)
    logger.info(
        f"[INGEST] file={Path(path).name} | parsed={len(raw)} | unique={len(unique)} "
        f"| entities={vocab.num_entities} | relations={vocab.num_relations} "
        f"| normalization={normalization.describe()}"
    )
    return unique, vocab


def write_split(out_dir: Path, split: DatasetSplit, vocab: Vocabulary, metadata: SplitMetadata) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for field, filename in SPLIT_FILES.items():
        write_triples(out_dir / filename, getattr(split, field), vocab)
    vocab.save(out_dir)
    with open(out_dir / METADATA_FILE, "w", encoding="utf-8", newline="") as f:
        f.write(metadata.model_dump_json(indent=2) + "\n")


def ingest(
    triples_path: Path,
    out_dir: Path,
    normalization: NormalizationSpec = NormalizationSpec(),
    ratios: Sequence[float] = DEFAULT_RATIOS,
    seed: int = 0,
    tau: float = DEFAULT_TAU,
    schema: ColumnSpec = ColumnSpec(),
) -> LoadedSplit:
    """Build and write a split directory from one raw triple file."""
    triples, vocab = prepare_triples(triples_path, normalization, schema)
    split = split_dataset(triples, ratios, seed, num_entities=vocab.num_entities)

    metadata = SplitMetadata(
        source=Path(triples_path).name,
        seed=seed,
        ratios=tuple(float(r) for r in ratios),
        tau=tau,
        normalization=normalization,
        counts={field: len(getattr(split, field)) for field in SPLIT_FILES},
        entity_digest=vocab.entity_digest(),
        relation_digest=vocab.relation_digest(),
    )
    write_split(out_dir, split, vocab, metadata)
    logger.info(
        f"[INGEST] status=complete | out={out_dir} | train={len(split.train)} "
        f"| validation={len(split.validation)} | test={len(split.test)} "
        f"| negatives={len(split.test_negatives)}"
    )
    return LoadedSplit(split=split, vocab=vocab, metadata=metadata)


def load_split(split_dir: Path) -> LoadedSplit:
    """Read a split directory back, checking the vocabulary against metadata.json."""
    split_dir = Path(split_dir)
    required = [*SPLIT_FILES.values(), METADATA_FILE, "entities.txt", "relations.txt"]
    missing = [name for name in required if not (split_dir / name).is_file()]
    if missing:
        raise DataError(f"{split_dir} is not a split directory (missing: {', '.join(missing)})")

    try:
        metadata = SplitMetadata.model_validate(
            json.loads((split_dir / METADATA_FILE).read_text(encoding="utf-8"))
        )
    except (json.JSONDecodeError, ValidationError) as e:
        raise DataError(f"{split_dir / METADATA_FILE}: invalid metadata ({e})")

    vocab = Vocabulary.load(split_dir)
    if vocab.entity_digest() != metadata.entity_digest or vocab.relation_digest() != metadata.relation_digest:
        raise VocabularyMismatchError(f"{split_dir}: vocabulary files do not match metadata digests")

    sizes = (vocab.num_entities, vocab.num_relations)
    parts = {field: read_triples(split_dir / filename, vocab) for field, filename in SPLIT_FILES.items()}
    if (vocab.num_entities, vocab.num_relations) != sizes:
        raise VocabularyMismatchError(f"{split_dir}: split files use names missing from the vocabulary")

    logger.info(
        f"[SPLIT] loaded={split_dir} | train={len(parts['train'])} | validation={len(parts['validation'])} "
        f"| test={len(parts['test'])} | tau={metadata.tau}"
    )
    return LoadedSplit(split=DatasetSplit(**parts), vocab=vocab, metadata=metadata)
