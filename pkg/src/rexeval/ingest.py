"""Reading, writing and aligning the canonical annotation file format.

The canonical format is a single JSON document::

    {
      "schema": "sincere/1",
      "name": "conll04",
      "split": "train",            // optional
      "docs": [
        {"doc_key": "d0",
         "sentences": [
           {"tokens": ["John", "Smith", ...],
            "entities": [{"id": "e0", "start": 0, "end": 2, "type": "Peop"}, ...],
            "relations": [{"head": "e0", "tail": "e1", "type": "Work_For"}, ...]}
         ]}
      ]
    }

``start``/``end`` are 0-based token offsets, end-exclusive. The ``schema``
field is mandatory and versioned; files without it are rejected so format
drift fails loudly instead of silently changing scores.
"""

from __future__ import annotations

import io
import json
from pathlib import Path
from typing import IO, Any, NamedTuple

from .model import Corpus, Document, Mention, RelationMention, Sentence, ensure_valid

__all__ = [
    "SCHEMA_ID",
    "SchemaError",
    "AlignmentReport",
    "Mismatch",
    "parse_canonical",
    "read_canonical",
    "corpus_to_payload",
    "write_canonical",
    "align",
]

SCHEMA_ID = "sincere/1"


class SchemaError(ValueError):
    """Input does not conform to the canonical schema; ``path`` is the JSON
    path of the offending value."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class Mismatch(NamedTuple):
    doc_key: str
    sent_index: int | None
    reason: str


class AlignmentReport(NamedTuple):
    matched_sentences: int
    mismatches: tuple[Mismatch, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _expect(value: Any, kind: type, path: str, what: str) -> Any:
    if kind is int and isinstance(value, bool):
        raise SchemaError(path, f"expected {what}, got boolean")
    if not isinstance(value, kind):
        raise SchemaError(path, f"expected {what}, got {type(value).__name__}")
    return value


def _get(record: dict, key: str, kind: type, path: str, what: str) -> Any:
    if key not in record:
        raise SchemaError(f"{path}.{key}", f"missing required field ({what})")
    return _expect(record[key], kind, f"{path}.{key}", what)


def parse_canonical(data: Any) -> Corpus:
    """Build a Corpus from decoded canonical JSON, checking the schema only.

    Corpus invariants (span bounds, endpoint resolution, ...) are not
    enforced here; use read_canonical for the validating entry point or run
    validate_corpus separately when violations should be reported as data.
    """
    root = _expect(data, dict, "$", "object")
    schema = _get(root, "schema", str, "$", "schema id string")
    if schema != SCHEMA_ID:
        raise SchemaError("$.schema", f"unsupported schema {schema!r} (expected {SCHEMA_ID!r})")
    name = _get(root, "name", str, "$", "corpus name string")
    split = root.get("split")
    if split is not None:
        _expect(split, str, "$.split", "split string")
    docs_field = _get(root, "docs", list, "$", "array of documents")
    docs = []
    for i, doc in enumerate(docs_field):
        dpath = f"$.docs[{i}]"
        _expect(doc, dict, dpath, "document object")
        doc_key = _get(doc, "doc_key", str, dpath, "doc_key string")
        sents_field = _get(doc, "sentences", list, dpath, "array of sentences")
        sentences = []
        for j, sent in enumerate(sents_field):
            spath = f"{dpath}.sentences[{j}]"
            _expect(sent, dict, spath, "sentence object")
            tokens_field = _get(sent, "tokens", list, spath, "array of token strings")
            for k, tok in enumerate(tokens_field):
                _expect(tok, str, f"{spath}.tokens[{k}]", "token string")
            entities = []
            for k, ent in enumerate(sent.get("entities", [])):
                epath = f"{spath}.entities[{k}]"
                _expect(ent, dict, epath, "entity object")
                entities.append(
                    Mention(
                        id=_get(ent, "id", str, epath, "entity id string"),
                        start=_get(ent, "start", int, epath, "token offset"),
                        end=_get(ent, "end", int, epath, "token offset"),
                        entity_type=_get(ent, "type", str, epath, "entity type string"),
                    )
                )
            relations = []
            for k, rel in enumerate(sent.get("relations", [])):
                rpath = f"{spath}.relations[{k}]"
                _expect(rel, dict, rpath, "relation object")
                relations.append(
                    RelationMention(
                        head=_get(rel, "head", str, rpath, "head entity id"),
                        tail=_get(rel, "tail", str, rpath, "tail entity id"),
                        relation_type=_get(rel, "type", str, rpath, "relation type string"),
                    )
                )
            sentences.append(Sentence(tuple(tokens_field), tuple(entities), tuple(relations)))
        docs.append(Document(doc_key, tuple(sentences)))
    return Corpus(name=name, split=split, docs=tuple(docs))


def read_canonical(source: str | Path | IO) -> Corpus:
    """Read and fully validate a canonical file from a path or open stream.

    Raises json.JSONDecodeError (with line/column) on malformed JSON,
    SchemaError on schema violations and CorpusValidationError when the
    parsed corpus breaks a model invariant.
    """
    if hasattr(source, "read"):
        raw = source.read()
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        data = json.loads(raw)
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    return ensure_valid(parse_canonical(data))


def corpus_to_payload(corpus: Corpus) -> dict:
    payload: dict[str, Any] = {"schema": SCHEMA_ID, "name": corpus.name}
    if corpus.split is not None:
        payload["split"] = corpus.split
    payload["docs"] = [
        {
            "doc_key": doc.doc_key,
            "sentences": [
                {
                    "tokens": list(sent.tokens),
                    "entities": [
                        {"id": m.id, "start": m.start, "end": m.end, "type": m.entity_type}
                        for m in sent.entities
                    ],
                    "relations": [
                        {"head": r.head, "tail": r.tail, "type": r.relation_type}
                        for r in sent.relations
                    ],
                }
                for sent in doc.sentences
            ],
        }
        for doc in corpus.docs
    ]
    return payload


def write_canonical(corpus: Corpus, destination: str | Path | IO) -> None:
    """Serialize ``corpus`` deterministically; the output re-reads to an
    equal Corpus. Non-ASCII tokens are written verbatim (UTF-8)."""
    ensure_valid(corpus)
    payload = corpus_to_payload(corpus)
    text = json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
    if hasattr(destination, "write"):
        if isinstance(destination, io.BufferedIOBase) or "b" in getattr(destination, "mode", ""):
            destination.write(text.encode("utf-8"))
        else:
            destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def align(gold: Corpus, pred: Corpus) -> AlignmentReport:
    """Pair sentences of two corpora by (doc_key, sentence index) and report
    every structural difference.

    Token sequences must match exactly: a prediction file that was produced
    from altered data (retokenized, truncated to relation-bearing sentences,
    resplit, ...) is not scorable against this gold, and the report says
    where the two diverge. Annotations are ignored; only structure counts.
    """
    ensure_valid(gold)
    ensure_valid(pred)
    mismatches: list[Mismatch] = []
    matched = 0
    pred_docs = {d.doc_key: d for d in pred.docs}
    gold_keys = {d.doc_key for d in gold.docs}
    for doc in gold.docs:
        pdoc = pred_docs.get(doc.doc_key)
        if pdoc is None:
            mismatches.append(Mismatch(doc.doc_key, None, "MissingDoc"))
            continue
        common = min(len(doc.sentences), len(pdoc.sentences))
        for idx in range(common):
            if doc.sentences[idx].tokens == pdoc.sentences[idx].tokens:
                matched += 1
            else:
                mismatches.append(Mismatch(doc.doc_key, idx, "TokenMismatch"))
        for idx in range(common, len(doc.sentences)):
            mismatches.append(Mismatch(doc.doc_key, idx, "MissingSentence"))
        for idx in range(common, len(pdoc.sentences)):
            mismatches.append(Mismatch(doc.doc_key, idx, "ExtraSentence"))
    for doc in pred.docs:
        if doc.doc_key not in gold_keys:
            mismatches.append(Mismatch(doc.doc_key, None, "ExtraDoc"))
    return AlignmentReport(matched, tuple(mismatches))
