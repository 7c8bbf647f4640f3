import io
from collections import Counter

import pytest

from ukge.core.errors import TripleParseError
from ukge.core.schema import ColumnSpec
from ukge.ingestion.parser import (
    Vocabulary,
    deduplicate_triples,
    parse_triples,
    read_triples,
    serialize_triples,
    write_triples,
)


def test_parse_single_line():
    vocab = Vocabulary()
    triples = parse_triples(["college\tsynonym\tuniversity\t0.99\n"], vocab)
    assert len(triples) == 1
    t = triples[0]
    assert vocab.entity_name(t.head) == "college"
    assert vocab.relation_name(t.relation) == "synonym"
    assert vocab.entity_name(t.tail) == "university"
    assert t.score == 0.99


def test_parse_empty_input():
    assert parse_triples([], Vocabulary()) == []
    assert parse_triples(io.StringIO(""), Vocabulary()) == []


def test_comments_and_blank_lines_are_skipped():
    text = "# header\n\na\tr\tb\t0.5\n   \n# trailing\n"
    triples = parse_triples(io.StringIO(text), Vocabulary())
    assert len(triples) == 1


def test_duplicates_kept_by_parse_and_resolved_keep_last():
    lines = [
        "a\tr\tb\t0.1\n",
        "b\tr\tc\t0.2\n",
        "a\tr\tb\t0.9\n",
        "c\tr\td\t0.3\n",
        "d\tr\ta\t0.4\n",
    ]
    vocab = Vocabulary()
    triples = parse_triples(lines, vocab)
    assert len(triples) == 5

    unique = deduplicate_triples(triples)
    assert len(unique) == 4
    ab = [t for t in unique if (vocab.entity_name(t.head), vocab.entity_name(t.tail)) == ("a", "b")]
    assert len(ab) == 1 and ab[0].score == 0.9


def test_dense_ids_follow_first_sight():
    vocab = Vocabulary()
    parse_triples(["x\tr1\ty\t1\n", "y\tr2\tz\t1\n", "x\tr1\tz\t1\n"], vocab)
    assert vocab.entities == ["x", "y", "z"]
    assert vocab.relations == ["r1", "r2"]
    assert [vocab.entity_id(n) for n in vocab.entities] == [0, 1, 2]


def test_self_loops_are_allowed():
    triples = parse_triples(["a\tsame_as\ta\t1.0\n"], Vocabulary())
    assert triples[0].head == triples[0].tail


def test_malformed_line_reports_line_number():
    with pytest.raises(TripleParseError) as info:
        parse_triples(["a\tr\tb\t0.5\n", "a\tr\tb\n"], Vocabulary(), source_name="kg.tsv")
    assert info.value.line_number == 2
    assert "kg.tsv:2" in str(info.value)


def test_non_numeric_score_is_rejected():
    with pytest.raises(TripleParseError) as info:
        parse_triples(["a\tr\tb\thigh\n"], Vocabulary())
    assert info.value.line_number == 1


def test_non_finite_score_is_rejected():
    with pytest.raises(TripleParseError):
        parse_triples(["a\tr\tb\tnan\n"], Vocabulary())


def test_custom_column_spec_ignores_extra_columns():
    spec = ColumnSpec(head=1, relation=0, tail=2, score=4, delimiter=",")
    vocab = Vocabulary()
    triples = parse_triples(["likes,alice,bob,ignored,0.75,extra\n"], vocab, spec)
    assert vocab.entity_name(triples[0].head) == "alice"
    assert vocab.relation_name(triples[0].relation) == "likes"
    assert triples[0].score == 0.75


def test_round_trip_preserves_multiset():
    lines = [
        "a\tr\tb\t0.1\n",
        "a\tr\tb\t0.1\n",
        "b\ts\tc\t0.30000000000000004\n",
        "c\tr\ta\t1e-07\n",
    ]
    vocab = Vocabulary()
    first = parse_triples(lines, vocab)
    text = serialize_triples(first, vocab)
    second = parse_triples(io.StringIO(text), vocab)
    assert Counter((t.key, t.score) for t in first) == Counter((t.key, t.score) for t in second)


def test_write_then_read_file(tmp_path, synonym_kg):
    vocab, triples = synonym_kg
    path = tmp_path / "out.tsv"
    write_triples(path, triples, vocab)
    again = read_triples(path, vocab)
    assert [(t.key, t.score) for t in again] == [(t.key, t.score) for t in triples]


def test_vocabulary_save_load_and_digest(tmp_path, synonym_kg):
    vocab, _ = synonym_kg
    vocab.save(tmp_path)
    loaded = Vocabulary.load(tmp_path)
    assert loaded.entities == vocab.entities
    assert loaded.relations == vocab.relations
    assert loaded.digest() == vocab.digest()

    other = Vocabulary(list(reversed(vocab.entities)), vocab.relations)
    assert other.entity_digest() != vocab.entity_digest()


def test_invalid_utf8_reports_file_and_line(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_bytes(b"a\tr\tb\t0.5\nc\tr\t\xff\xfe\t0.7\n")
    with pytest.raises(TripleParseError) as info:
        read_triples(path, Vocabulary())
    assert info.value.line_number == 2
    assert f"{path}:2" in str(info.value)
