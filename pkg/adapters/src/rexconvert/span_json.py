"""Span-JSON dialect: the per-sentence record format used by preprocessed
relation-extraction releases.

One file is a JSON array of records::

    {"tokens": [...],
     "entities": [{"type": "Peop", "start": 0, "end": 2}, ...],
     "relations": [{"type": "Work_For", "head": 0, "tail": 1}, ...],
     "doc_key": "optional"}

Offsets are token-level and end-exclusive; relation ``head``/``tail`` are
indices into the record's entity list. Records with a ``doc_key`` are
grouped into documents (consecutive runs of the same key); without one the
whole file becomes a single document named after the corpus.
"""

from __future__ import annotations

import json
from pathlib import Path

from .canonical import ConversionError, sentence_record, write_canonical_file


def _require(condition: bool, record_number: int, message: str) -> None:
    if not condition:
        raise ConversionError(f"record {record_number}: {message}")


def parse_span_json(data: object) -> list[tuple[str | None, dict]]:
    """Check the dialect and return (doc_key, canonical sentence) pairs."""
    if not isinstance(data, list):
        raise ConversionError("top level must be a JSON array of sentence records")
    out = []
    for number, record in enumerate(data):
        _require(isinstance(record, dict), number, "record must be an object")
        tokens = record.get("tokens")
        _require(isinstance(tokens, list) and all(isinstance(t, str) for t in tokens), number,
                 "tokens must be an array of strings")
        entities = []
        for e in record.get("entities", []):
            _require(
                isinstance(e, dict) and isinstance(e.get("type"), str)
                and isinstance(e.get("start"), int) and isinstance(e.get("end"), int)
                and not isinstance(e.get("start"), bool) and not isinstance(e.get("end"), bool),
                number,
                "entity must carry string type and integer start/end",
            )
            _require(0 <= e["start"] < e["end"] <= len(tokens), number,
                     f"entity span [{e['start']}, {e['end']}) outside sentence of {len(tokens)} tokens")
            entities.append((e["start"], e["end"], e["type"]))
        relations = []
        for r in record.get("relations", []):
            _require(
                isinstance(r, dict) and isinstance(r.get("type"), str)
                and isinstance(r.get("head"), int) and isinstance(r.get("tail"), int)
                and not isinstance(r.get("head"), bool) and not isinstance(r.get("tail"), bool),
                number,
                "relation must carry string type and integer head/tail entity indices",
            )
            for endpoint in (r["head"], r["tail"]):
                _require(0 <= endpoint < len(entities), number,
                         f"relation endpoint {endpoint} out of range for {len(entities)} entities")
            relations.append((r["head"], r["tail"], r["type"]))
        doc_key = record.get("doc_key")
        if doc_key is not None:
            _require(isinstance(doc_key, str) and doc_key != "", number, "doc_key must be a non-empty string")
        out.append((doc_key, sentence_record(tokens, entities, relations)))
    return out


def _group_documents(pairs: list[tuple[str | None, dict]], fallback_key: str) -> list[tuple[str, list[dict]]]:
    docs: list[tuple[str, list[dict]]] = []
    seen: set[str] = set()
    for doc_key, sentence in pairs:
        key = doc_key or fallback_key
        if docs and docs[-1][0] == key:
            docs[-1][1].append(sentence)
        else:
            if key in seen:
                raise ConversionError(f"doc_key {key!r} appears in non-consecutive records")
            seen.add(key)
            docs.append((key, [sentence]))
    return docs


def convert_span_json(in_path: str | Path, out_path: str | Path, name: str, split: str | None = None) -> int:
    """Convert a span-JSON file to a canonical file; returns the sentence count."""
    with open(in_path, encoding="utf-8") as fh:
        data = json.load(fh)
    pairs = parse_span_json(data)
    docs = _group_documents(pairs, fallback_key=name)
    write_canonical_file(out_path, name, split, docs)
    return len(pairs)


def export_span_json(in_path: str | Path, out_path: str | Path) -> int:
    """Reverse path for interop tests: canonical file back to span-JSON.

    Mention id strings are not representable in span-JSON; everything else
    survives, and corpora whose ids already follow the synthesized e0, e1,
    ... convention round-trip to an equal corpus."""
    with open(in_path, encoding="utf-8") as fh:
        payload = json.load(fh)
    records = []
    for doc in payload.get("docs", []):
        for sentence in doc.get("sentences", []):
            index_of = {e["id"]: i for i, e in enumerate(sentence.get("entities", []))}
            records.append(
                {
                    "doc_key": doc["doc_key"],
                    "tokens": sentence["tokens"],
                    "entities": [
                        {"type": e["type"], "start": e["start"], "end": e["end"]}
                        for e in sentence.get("entities", [])
                    ],
                    "relations": [
                        {"type": r["type"], "head": index_of[r["head"]], "tail": index_of[r["tail"]]}
                        for r in sentence.get("relations", [])
                    ],
                }
            )
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(records, ensure_ascii=False, indent=2) + "\n")
    return len(records)
