"""
Model File Container
--------------------
Layout (all integers little-endian):

    8 bytes   magic b"UKGEMDL\\0"
    8 bytes   header length N (uint64)
    N bytes   UTF-8 JSON header, sorted keys
    ...       entity matrix, float64 '<f8', row-major
    ...       relation matrix, float64 '<f8', row-major

No timestamps are stored, so saving the same parameters twice yields the same bytes.
"""

import json
import struct
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel

from ukge.core.errors import DataError, VocabularyMismatchError
from ukge.core.logger import get_logger
from ukge.core.schema import Variant
from ukge.ingestion.parser import Vocabulary
from ukge.models.embedding_model import ModelParams

logger = get_logger(__name__)

MAGIC = b"UKGEMDL\x00"
FORMAT_VERSION = 1
DTYPE = "<f8"


class ModelHeader(BaseModel):
    format_version: int = FORMAT_VERSION
    dim: int
    variant: Variant
    entity_count: int
    relation_count: int
    entity_digest: str
    relation_digest: str
    w: float
    b: float
    dtype: str = DTYPE
    byteorder: str = "little"
    order: str = "C"

    def check_vocabulary(self, vocab: Vocabulary) -> None:
        if self.entity_digest != vocab.entity_digest() or self.relation_digest != vocab.relation_digest():
            raise VocabularyMismatchError(
                "model vocabulary does not match the dataset vocabulary "
                f"(model: {self.entity_count} entities / {self.relation_count} relations, "
                f"data: {vocab.num_entities} / {vocab.num_relations})"
            )


def save_model(path: Path, params: ModelParams, vocab: Vocabulary) -> ModelHeader:
    if params.num_entities != vocab.num_entities or params.num_relations != vocab.num_relations:
        raise VocabularyMismatchError("parameter shapes do not match the vocabulary")
    header = ModelHeader(
        dim=params.dim,
        variant=params.variant,
        entity_count=params.num_entities,
        relation_count=params.num_relations,
        entity_digest=vocab.entity_digest(),
        relation_digest=vocab.relation_digest(),
        w=params.w,
        b=params.b,
    )
    header_bytes = json.dumps(header.model_dump(mode="json"), sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(header_bytes)))
        f.write(header_bytes)
        f.write(params.entity.astype(DTYPE, copy=False).tobytes(order="C"))
        f.write(params.relation.astype(DTYPE, copy=False).tobytes(order="C"))
    logger.info(f"[MODEL] status=saved | path={path} | dim={header.dim} | variant={header.variant.value}")
    return header


def load_model(path: Path, vocab: Optional[Vocabulary] = None) -> Tuple[ModelParams, ModelHeader]:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise DataError(f"{path} is not a model file")
    (header_len,) = struct.unpack("<Q", data[8:16])
    header = ModelHeader.model_validate_json(data[16:16 + header_len])
    if header.format_version != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {header.format_version}")
    if vocab is not None:
        header.check_vocabulary(vocab)

    offset = 16 + header_len
    n_entity = header.entity_count * header.dim
    n_relation = header.relation_count * header.dim
    expected = offset + 8 * (n_entity + n_relation)
    if len(data) != expected:
        raise DataError(f"{path} is truncated or corrupt: {len(data)} bytes, expected {expected}")

    entity = np.frombuffer(data, dtype=header.dtype, count=n_entity, offset=offset)
    relation = np.frombuffer(data, dtype=header.dtype, count=n_relation, offset=offset + 8 * n_entity)
    params = ModelParams(
        entity.reshape(header.entity_count, header.dim).astype(np.float64),
        relation.reshape(header.relation_count, header.dim).astype(np.float64),
        w=header.w,
        b=header.b,
        variant=header.variant,
    )
    return params, header


def export_text(directory: Path, params: ModelParams, vocab: Vocabulary) -> None:
    """One row per entity/relation: name<TAB>space-separated values."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for filename, names, matrix in (
        ("entity_embeddings.tsv", vocab.entities, params.entity),
        ("relation_embeddings.tsv", vocab.relations, params.relation),
    ):
        with open(directory / filename, "w", encoding="utf-8", newline="") as f:
            for name, row in zip(names, matrix):
                f.write(name + "\t" + " ".join(repr(float(v)) for v in row) + "\n")
    with open(directory / "mapping.txt", "w", encoding="utf-8", newline="") as f:
        f.write(f"variant\t{params.variant.value}\nw\t{params.w!r}\nb\t{params.b!r}\n")
