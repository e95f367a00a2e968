"""Tabular dialect: token-per-line dumps with a tag column and a relation
column.

Exactly three tab-separated columns per non-blank line::

    TOKEN<TAB>TAG<TAB>RELATIONS

Blank lines separate sentences. TAG is a BILOU or BIO label (``B-X``,
``I-X``, ``L-X``, ``U-X`` or ``O``). RELATIONS is ``_`` or a
comma-separated list of ``HEAD:TYPE`` pairs placed on the LAST token of the
relation's tail mention, where HEAD is the token index of the head
mention's last token. Other encodings are rejected, not guessed.

Malformed tag transitions are repaired, not fatal: an ``I``/``L`` without a
matching opener starts a new span (an ``L`` closes it immediately, giving a
single-token mention), and a type change inside a span closes the old span
first. Every repair increments the warning count returned to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .canonical import ConversionError, sentence_record, write_canonical_file

_PREFIXES = ("B", "I", "L", "U")


@dataclass
class DecodeResult:
    spans: list[tuple[int, int, str]]
    repairs: int


def decode_tags(tags: list[str]) -> DecodeResult:
    """BILOU/BIO tag sequence to (start, end, type) spans, with repair count."""
    spans: list[tuple[int, int, str]] = []
    repairs = 0
    open_start: int | None = None
    open_type: str | None = None

    def close(upto: int) -> None:
        nonlocal open_start, open_type
        if open_start is not None:
            spans.append((open_start, upto, open_type))
        open_start, open_type = None, None

    for i, tag in enumerate(tags):
        if tag == "O":
            close(i)
            continue
        if "-" not in tag:
            raise ConversionError(f"tag {tag!r} is neither O nor PREFIX-TYPE")
        prefix, label = tag.split("-", 1)
        if prefix not in _PREFIXES:
            raise ConversionError(f"unknown tag prefix in {tag!r}")
        if prefix == "B":
            close(i)
            open_start, open_type = i, label
        elif prefix == "U":
            close(i)
            spans.append((i, i + 1, label))
        elif prefix == "I":
            if open_start is None or open_type != label:
                close(i)
                repairs += 1
                open_start, open_type = i, label
            # else: continuation
        else:  # L
            if open_start is None or open_type != label:
                close(i)
                repairs += 1
                spans.append((i, i + 1, label))
            else:
                spans.append((open_start, i + 1, open_type))
                open_start, open_type = None, None
    close(len(tags))
    return DecodeResult(spans, repairs)


def _parse_relation_column(value: str, line_number: int) -> list[tuple[int, str]]:
    if value == "_":
        return []
    pairs = []
    for chunk in value.split(","):
        head, sep, rtype = chunk.partition(":")
        if not sep or not rtype:
            raise ConversionError(f"line {line_number}: relation column {value!r} is not HEAD:TYPE pairs")
        try:
            head_index = int(head)
        except ValueError:
            raise ConversionError(f"line {line_number}: relation head {head!r} is not a token index")
        pairs.append((head_index, rtype))
    return pairs


def _read_blocks(path: str | Path):
    """Yield (first line number, [(token, tag, relation column), ...]) per sentence."""
    block: list[tuple[str, str, str]] = []
    block_start = 1
    with open(path, encoding="utf-8") as fh:
        for line_number, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                if block:
                    yield block_start, block
                    block = []
                continue
            columns = line.split("\t")
            if len(columns) != 3:
                raise ConversionError(
                    f"line {line_number}: expected TOKEN<TAB>TAG<TAB>RELATIONS, got {len(columns)} columns"
                )
            if not block:
                block_start = line_number
            block.append(tuple(columns))
    if block:
        yield block_start, block


def convert_tabular(
    in_path: str | Path, out_path: str | Path, name: str, split: str | None = None
) -> tuple[int, int]:
    """Convert a tabular file to a canonical file.

    Returns (sentence count, repair warning count). The whole file becomes
    one document keyed by the corpus name."""
    sentences = []
    repairs = 0
    for first_line, block in _read_blocks(in_path):
        tokens = [token for token, _, _ in block]
        decoded = decode_tags([tag for _, tag, _ in block])
        repairs += decoded.repairs
        entity_by_last_token = {}
        for index, (start, end, _) in enumerate(decoded.spans):
            entity_by_last_token[end - 1] = index
        relations = []
        for offset, (_, _, relation_column) in enumerate(block):
            line_number = first_line + offset
            for head_token, rtype in _parse_relation_column(relation_column, line_number):
                tail = entity_by_last_token.get(offset)
                if tail is None:
                    raise ConversionError(
                        f"line {line_number}: relation attached to token {offset}, "
                        "which is not the last token of any mention"
                    )
                head = entity_by_last_token.get(head_token)
                if head is None:
                    raise ConversionError(
                        f"line {line_number}: relation head token {head_token} "
                        "is not the last token of any mention"
                    )
                relations.append((head, tail, rtype))
        sentences.append(sentence_record(tokens, decoded.spans, relations))
    write_canonical_file(out_path, name, split, [(name, sentences)])
    return len(sentences), repairs
