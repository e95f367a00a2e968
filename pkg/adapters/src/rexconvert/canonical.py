"""Writer for the canonical annotation schema (version ``sincere/1``).

This package normalizes foreign formats into that schema and is coupled to
the evaluation stack only through it: files written here are consumed by
the ``rexeval`` tools, never Python objects.
"""

from __future__ import annotations

import json
from pathlib import Path

SCHEMA_ID = "sincere/1"


class ConversionError(ValueError):
    """Input does not conform to the documented source dialect."""


def sentence_record(tokens, entities, relations) -> dict:
    """One canonical sentence.

    ``entities``: (start, end, type) triples in order; ids become e0, e1, ...
    ``relations``: (head index, tail index, type) with indices into entities.
    """
    return {
        "tokens": list(tokens),
        "entities": [
            {"id": f"e{i}", "start": start, "end": end, "type": etype}
            for i, (start, end, etype) in enumerate(entities)
        ],
        "relations": [
            {"head": f"e{head}", "tail": f"e{tail}", "type": rtype}
            for head, tail, rtype in relations
        ],
    }


def write_canonical_file(
    destination: str | Path,
    name: str,
    split: str | None,
    docs: list[tuple[str, list[dict]]],
) -> None:
    """Write documents of sentence records as a canonical file."""
    payload: dict = {"schema": SCHEMA_ID, "name": name}
    if split is not None:
        payload["split"] = split
    payload["docs"] = [{"doc_key": doc_key, "sentences": sentences} for doc_key, sentences in docs]
    with open(destination, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, ensure_ascii=False, indent=2) + "\n")
