import json

import numpy as np
import pytest

from ukge.core.errors import DataError, VocabularyMismatchError
from ukge.core.schema import NormalizationMethod, NormalizationSpec
from ukge.ingestion.pipeline import METADATA_FILE, SPLIT_FILES, ingest, load_split

CN15K = NormalizationSpec(method=NormalizationMethod.LOG_MIN_MAX, lo=0.1, hi=3.0, floor=0.1)


@pytest.fixture
def raw_file(tmp_path):
    """Sixty weighted co-occurrence style triples, one key repeated with a new score."""
    rng = np.random.default_rng(21)
    seen, lines = set(), ["# head\trelation\ttail\tweight"]
    while len(seen) < 60:
        key = (int(rng.integers(25)), int(rng.integers(4)), int(rng.integers(25)))
        if key in seen:
            continue
        seen.add(key)
        h, r, t = key
        lines.append(f"c{h}\trel{r}\tc{t}\t{rng.uniform(0.05, 22.0):.4f}")
    first = lines[1].split("\t")
    lines.append("\t".join(first[:3] + ["3.5"]))
    path = tmp_path / "raw.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_ingest_normalizes_and_splits(raw_file, tmp_path):
    loaded = ingest(raw_file, tmp_path / "split", CN15K, seed=4)
    split = loaded.split
    observed = split.all_observed()
    assert len(observed) == 60
    assert all(0.1 <= t.score <= 1.0 for t in observed)
    assert len(split.test_negatives) == len(split.test)
    assert loaded.metadata.counts == {
        "train": len(split.train), "validation": len(split.validation),
        "test": len(split.test), "test_negatives": len(split.test_negatives),
    }
    for filename in [*SPLIT_FILES.values(), METADATA_FILE, "entities.txt", "relations.txt"]:
        assert (tmp_path / "split" / filename).is_file()


def test_duplicate_keeps_last_score(raw_file, tmp_path):
    loaded = ingest(raw_file, tmp_path / "split", CN15K)
    vocab = loaded.vocab
    head, relation, tail = raw_file.read_text(encoding="utf-8").splitlines()[1].split("\t")[:3]
    key = (vocab.entity_id(head), vocab.relation_id(relation), vocab.entity_id(tail))
    (fact,) = [t for t in loaded.split.all_observed() if t.key == key]
    # 3.5 is above the upper clamp
    assert fact.score == 1.0


def test_reruns_are_byte_identical(raw_file, tmp_path):
    ingest(raw_file, tmp_path / "a", CN15K, seed=9)
    ingest(raw_file, tmp_path / "b", CN15K, seed=9)
    for filename in [*SPLIT_FILES.values(), METADATA_FILE, "entities.txt", "relations.txt"]:
        assert (tmp_path / "a" / filename).read_bytes() == (tmp_path / "b" / filename).read_bytes()


def test_load_split_round_trip(raw_file, tmp_path):
    written = ingest(raw_file, tmp_path / "split", CN15K, seed=1, tau=0.8)
    loaded = load_split(tmp_path / "split")
    assert loaded.split == written.split
    assert loaded.vocab.entities == written.vocab.entities
    assert loaded.tau == 0.8
    metadata = json.loads((tmp_path / "split" / METADATA_FILE).read_text(encoding="utf-8"))
    assert metadata["normalization"]["method"] == "log-min-max"


def test_train_only_ratios(raw_file, tmp_path):
    loaded = ingest(raw_file, tmp_path / "split", CN15K, ratios=(1.0, 0.0, 0.0))
    assert len(loaded.split.train) == 60
    assert (tmp_path / "split" / "valid.tsv").read_text(encoding="utf-8") == ""
    reloaded = load_split(tmp_path / "split")
    assert reloaded.split.test == [] and reloaded.split.validation == []


def test_load_split_rejects_tampering(raw_file, tmp_path):
    ingest(raw_file, tmp_path / "split", CN15K)
    entities = tmp_path / "split" / "entities.txt"
    original = entities.read_text(encoding="utf-8")
    entities.write_text(original + "ghost\n", encoding="utf-8")
    with pytest.raises(VocabularyMismatchError):
        load_split(tmp_path / "split")

    entities.write_text(original, encoding="utf-8")
    with open(tmp_path / "split" / "train.tsv", "a", encoding="utf-8") as f:
        f.write("stranger\trel0\tc1\t0.5\n")
    with pytest.raises(VocabularyMismatchError):
        load_split(tmp_path / "split")


def test_load_split_requires_all_files(raw_file, tmp_path):
    ingest(raw_file, tmp_path / "split", CN15K)
    (tmp_path / "split" / "test_negatives.tsv").unlink()
    with pytest.raises(DataError):
        load_split(tmp_path / "split")
    with pytest.raises(DataError):
        load_split(tmp_path / "nowhere")
