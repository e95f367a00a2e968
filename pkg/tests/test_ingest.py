import io
import json

import pytest

from rexeval.ingest import SCHEMA_ID, SchemaError, align, read_canonical, write_canonical
from rexeval.model import Corpus, CorpusValidationError, Document, Mention, Sentence

from conftest import FIXTURES, load_fixture
from corpusgen import random_corpus


def test_minimal_file_roundtrips(tmp_path):
    data = {
        "schema": SCHEMA_ID,
        "name": "tiny",
        "docs": [{"doc_key": "d", "sentences": [{"tokens": ["hello"], "entities": [], "relations": []}]}],
    }
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    corpus = read_canonical(path)
    assert corpus.n_sentences == 1
    assert corpus.split is None
    assert corpus.docs[0].sentences[0].tokens == ("hello",)


def test_missing_schema_field_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "x", "docs": []}), encoding="utf-8")
    with pytest.raises(SchemaError, match="schema"):
        read_canonical(path)


def test_wrong_schema_version_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema": "sincere/99", "name": "x", "docs": []}), encoding="utf-8")
    with pytest.raises(SchemaError, match="sincere/99"):
        read_canonical(path)


def test_schema_error_carries_json_path(tmp_path):
    data = {
        "schema": SCHEMA_ID,
        "name": "x",
        "docs": [{"doc_key": "d", "sentences": [{"tokens": ["a"], "entities": [{"id": "e0", "start": 0, "end": "x", "type": "T"}]}]}],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(SchemaError) as err:
        read_canonical(path)
    assert "$.docs[0].sentences[0].entities[0].end" in str(err.value)


def test_span_past_token_count_names_the_entity(tmp_path):
    data = {
        "schema": SCHEMA_ID,
        "name": "x",
        "docs": [{"doc_key": "d", "sentences": [{"tokens": ["a"], "entities": [{"id": "e7", "start": 0, "end": 4, "type": "T"}]}]}],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(CorpusValidationError, match="e7"):
        read_canonical(path)


def test_json_syntax_error_has_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"schema": ', encoding="utf-8")
    with pytest.raises(json.JSONDecodeError) as err:
        read_canonical(path)
    assert err.value.lineno >= 1


def test_write_then_read_is_identity(tmp_path, mini_gold, conll_like, ace_like):
    for corpus in (mini_gold, conll_like, ace_like):
        out = tmp_path / "out.json"
        write_canonical(corpus, out)
        assert read_canonical(out) == corpus


def test_rewrite_is_byte_stable(tmp_path, conll_like):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    write_canonical(conll_like, first)
    write_canonical(read_canonical(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_empty_corpus_writes_empty_docs(tmp_path):
    out = tmp_path / "empty.json"
    write_canonical(Corpus("nothing", None, ()), out)
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["docs"] == []
    assert "split" not in data


def test_non_ascii_tokens_roundtrip(tmp_path):
    corpus = Corpus(
        "utf8",
        "test",
        (Document("d", (Sentence(("café", "Ángel", "naïve"), (Mention("e0", 0, 1, "Löc"),)),)),),
    )
    out = tmp_path / "utf8.json"
    write_canonical(corpus, out)
    assert "café" in out.read_text(encoding="utf-8")
    assert read_canonical(out) == corpus


def test_read_from_stream(mini_gold):
    buffer = io.StringIO()
    write_canonical(mini_gold, buffer)
    buffer.seek(0)
    assert read_canonical(buffer) == mini_gold


def test_random_corpora_roundtrip(tmp_path):
    for seed in range(15):
        corpus = random_corpus(seed)
        out = tmp_path / f"r{seed}.json"
        write_canonical(corpus, out)
        assert read_canonical(out) == corpus


def strip_annotations(corpus):
    docs = tuple(
        Document(d.doc_key, tuple(Sentence(s.tokens) for s in d.sentences)) for d in corpus.docs
    )
    return Corpus(corpus.name, corpus.split, docs)


def test_align_identity_and_stripped(mini_gold, conll_like):
    for corpus in (mini_gold, conll_like):
        assert align(corpus, corpus).ok
        report = align(corpus, strip_annotations(corpus))
        assert report.ok
        assert report.matched_sentences == corpus.n_sentences


def test_align_flags_single_token_edit(mini_gold):
    docs = list(mini_gold.docs)
    s0 = docs[0].sentences[0]
    tokens = list(s0.tokens)
    tokens[0] = "Johnny"
    edited = Sentence(tuple(tokens), s0.entities, s0.relations)
    docs[0] = Document(docs[0].doc_key, (edited,) + docs[0].sentences[1:])
    pred = Corpus(mini_gold.name, mini_gold.split, tuple(docs))
    report = align(mini_gold, pred)
    assert [m.reason for m in report.mismatches] == ["TokenMismatch"]
    assert report.mismatches[0].doc_key == "d0"
    assert report.mismatches[0].sent_index == 0


def test_align_flags_truncation_to_relation_bearing_sentences(ace_like):
    # drop every relation-free sentence (they all live in doc a1, so the
    # surviving prefix keeps its positions and the tail goes missing)
    docs = []
    for doc in ace_like.docs:
        kept = tuple(s for s in doc.sentences if s.relations)
        docs.append(Document(doc.doc_key, kept))
    truncated = Corpus(ace_like.name, ace_like.split, tuple(docs))
    report = align(ace_like, truncated)
    dropped = sum(1 for _, _, s in ace_like.iter_sentences() if not s.relations)
    missing = [m for m in report.mismatches if m.reason == "MissingSentence"]
    assert len(missing) == dropped
    assert len(report.mismatches) == dropped


def test_align_missing_and_extra_docs(mini_gold):
    pred = Corpus(mini_gold.name, mini_gold.split, mini_gold.docs[:1])
    report = align(mini_gold, pred)
    assert [m.reason for m in report.mismatches] == ["MissingDoc"]
    report = align(pred, mini_gold)
    assert [m.reason for m in report.mismatches] == ["ExtraDoc"]


def test_align_extra_sentence(mini_gold):
    doc0 = mini_gold.docs[0]
    extended = Document(doc0.doc_key, doc0.sentences + (Sentence(("bonus",)),))
    pred = Corpus(mini_gold.name, mini_gold.split, (extended,) + mini_gold.docs[1:])
    report = align(mini_gold, pred)
    assert [m.reason for m in report.mismatches] == ["ExtraSentence"]
