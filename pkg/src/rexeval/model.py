"""Canonical in-memory model for token-level entity and relation annotations.

Offsets are 0-based token indices with an exclusive ``end``, so a mention's
length is always ``end - start``. Relations are intra-sentence and directed;
symmetric relation types are handled at key-extraction time, not in the data.

All types are immutable value objects: equality is structural and everything
can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

__all__ = [
    "Mention",
    "RelationMention",
    "Sentence",
    "Document",
    "Corpus",
    "EntityKey",
    "RelationKey",
    "Violation",
    "CorpusValidationError",
    "validate_corpus",
    "ensure_valid",
    "entity_key_set",
    "relation_key_set",
]


@dataclass(frozen=True)
class Mention:
    """A typed entity mention: token span ``[start, end)`` plus a type label."""

    id: str
    start: int
    end: int
    entity_type: str

    def overlaps(self, other: "Mention") -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, other: "Mention") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass(frozen=True)
class RelationMention:
    """A directed, typed relation between two mentions of the same sentence.

    ``head`` and ``tail`` are mention ids, resolved against the enclosing
    sentence's entity list.
    """

    head: str
    tail: str
    relation_type: str


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]
    entities: tuple[Mention, ...] = ()
    relations: tuple[RelationMention, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "relations", tuple(self.relations))

    def mention(self, mention_id: str) -> Mention | None:
        for m in self.entities:
            if m.id == mention_id:
                return m
        return None


@dataclass(frozen=True)
class Document:
    doc_key: str
    sentences: tuple[Sentence, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))


@dataclass(frozen=True)
class Corpus:
    name: str
    split: str | None = None
    docs: tuple[Document, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "docs", tuple(self.docs))

    def iter_sentences(self) -> Iterator[tuple[str, int, Sentence]]:
        """Yield (doc_key, sentence index, sentence) in corpus order."""
        for doc in self.docs:
            for idx, sent in enumerate(doc.sentences):
                yield doc.doc_key, idx, sent

    @property
    def n_sentences(self) -> int:
        return sum(len(d.sentences) for d in self.docs)

    def entity_types(self) -> set[str]:
        return {m.entity_type for _, _, s in self.iter_sentences() for m in s.entities}

    def relation_types(self) -> set[str]:
        return {r.relation_type for _, _, s in self.iter_sentences() for r in s.relations}


class EntityKey(NamedTuple):
    """Corpus-wide identity of a mention. ``entity_type`` is None when the
    evaluation setting ignores argument types."""

    doc_key: str
    sent_index: int
    start: int
    end: int
    entity_type: str | None


class RelationKey(NamedTuple):
    doc_key: str
    sent_index: int
    relation_type: str
    head: EntityKey
    tail: EntityKey


@dataclass(frozen=True)
class Violation:
    """A single invariant violation; ``path`` locates the offending item."""

    code: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code} at {self.path}] {self.message}"


class CorpusValidationError(ValueError):
    """Raised when an operation requires a well-formed corpus and gets one
    that is not."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        extra = "" if len(self.violations) <= 5 else f" (+{len(self.violations) - 5} more)"
        super().__init__(f"corpus is not well-formed: {lines}{extra}")


def validate_corpus(corpus: Corpus) -> list[Violation]:
    """Collect every invariant violation in ``corpus``.

    Violations are data, not failures: an empty list means the corpus is
    well-formed. Checked invariants: non-empty unique doc keys, non-empty
    token lists, spans inside token bounds with start < end, non-empty
    mention ids unique per sentence, relation endpoints resolving within the
    sentence, and no self-relations. Overlapping or nested mentions are
    permitted (the stats module reports them instead).
    """
    violations: list[Violation] = []
    seen_doc_keys: set[str] = set()
    for doc in corpus.docs:
        if not doc.doc_key:
            violations.append(Violation("EmptyDocKey", "<corpus>", "document has empty doc_key"))
        elif doc.doc_key in seen_doc_keys:
            violations.append(
                Violation("DuplicateDocKey", doc.doc_key, f"doc_key {doc.doc_key!r} appears more than once")
            )
        else:
            seen_doc_keys.add(doc.doc_key)
        for sent_index, sent in enumerate(doc.sentences):
            loc = f"{doc.doc_key}/sent{sent_index}"
            n = len(sent.tokens)
            if n == 0:
                violations.append(Violation("EmptyTokenList", loc, "sentence has no tokens"))
            ids: set[str] = set()
            for m in sent.entities:
                mloc = f"{loc}/{m.id or '<anonymous>'}"
                if not m.id:
                    violations.append(Violation("EmptyMentionId", mloc, "mention id is empty"))
                elif m.id in ids:
                    violations.append(
                        Violation("DuplicateMentionId", mloc, f"mention id {m.id!r} repeats in sentence")
                    )
                else:
                    ids.add(m.id)
                if m.start >= m.end:
                    violations.append(
                        Violation("SpanEmpty", mloc, f"span [{m.start}, {m.end}) is empty or inverted")
                    )
                if m.start < 0 or m.end > n:
                    violations.append(
                        Violation(
                            "SpanOutOfBounds",
                            mloc,
                            f"span [{m.start}, {m.end}) outside sentence of {n} tokens",
                        )
                    )
            for i, r in enumerate(sent.relations):
                rloc = f"{loc}/rel{i}"
                for endpoint in (r.head, r.tail):
                    if endpoint not in ids:
                        violations.append(
                            Violation(
                                "DanglingEndpoint",
                                rloc,
                                f"relation references unknown mention id {endpoint!r}",
                            )
                        )
                if r.head == r.tail:
                    violations.append(
                        Violation("SelfRelation", rloc, f"head and tail are both {r.head!r}")
                    )
    return violations


def ensure_valid(corpus: Corpus) -> Corpus:
    """Return ``corpus`` unchanged, raising CorpusValidationError if malformed."""
    violations = validate_corpus(corpus)
    if violations:
        raise CorpusValidationError(violations)
    return corpus


def entity_key_set(corpus: Corpus, typed: bool = True) -> set[EntityKey]:
    """Deduplicated mention identities of the whole corpus.

    With ``typed=True`` the key carries the entity type (the setting used for
    NER and for strict relation arguments); with ``typed=False`` the type is
    dropped, so same-span mentions of different types collapse.
    """
    ensure_valid(corpus)
    keys: set[EntityKey] = set()
    for doc_key, sent_index, sent in corpus.iter_sentences():
        for m in sent.entities:
            keys.add(EntityKey(doc_key, sent_index, m.start, m.end, m.entity_type if typed else None))
    return keys


def _arg_sort_key(key: EntityKey) -> tuple[int, int, str]:
    return (key.start, key.end, key.entity_type or "")


def relation_key_set(
    corpus: Corpus,
    typed_args: bool = True,
    symmetric_types: Iterable[str] = (),
) -> set[RelationKey]:
    """Deduplicated relation identities.

    Arguments are embedded as EntityKeys (typed or untyped per
    ``typed_args``). For relation types listed in ``symmetric_types`` the
    (head, tail) pair is canonicalized to an order-independent form, so the
    two directions of a symmetric relation collapse to one key.
    """
    ensure_valid(corpus)
    symmetric = set(symmetric_types)
    keys: set[RelationKey] = set()
    for doc_key, sent_index, sent in corpus.iter_sentences():
        by_id = {m.id: m for m in sent.entities}
        for r in sent.relations:
            head_m = by_id[r.head]
            tail_m = by_id[r.tail]
            head = EntityKey(
                doc_key, sent_index, head_m.start, head_m.end, head_m.entity_type if typed_args else None
            )
            tail = EntityKey(
                doc_key, sent_index, tail_m.start, tail_m.end, tail_m.entity_type if typed_args else None
            )
            if r.relation_type in symmetric and _arg_sort_key(tail) < _arg_sort_key(head):
                head, tail = tail, head
            keys.add(RelationKey(doc_key, sent_index, r.relation_type, head, tail))
    return keys
