"""Seeded error injection: synthetic prediction corpora from gold.

Training real extraction models is not needed to study how evaluation
criteria react to specific error classes; injecting those error classes
directly is cheaper and fully controlled. Each knob is the rate of one
error mode:

* entity drop, entity type swap, entity boundary shift (``p_ent_*``),
* relation drop and relation type swap (``p_rel_*``),
* spurious entity / relation insertion, at most one of each per sentence.

Randomness is drawn from per-annotation streams keyed by
(seed, kind, doc index, sentence index, annotation index), so the outcome
for one annotation never depends on how many draws another annotation
consumed. Identical (gold, profile) inputs give bit-identical outputs.

Pipeline per sentence, in order: each entity independently is dropped,
else type-swapped (uniform over the other gold types), else boundary-
shifted (one side, one token, clamped to the sentence, skipped if the span
would become empty). Relations lose endpoints with their entities, then
surviving ones are dropped, else type-swapped. Spurious entities take a
span of length <= max_spurious_len that equals no existing mention span in
the sentence; spurious relations take an (head, tail, type) triple not
already present. Token sequences are never touched, so output corpora
always align with their gold.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, fields
from typing import Iterable, Mapping, NamedTuple

from .audit import GapReport, gap
from .model import Corpus, Document, Mention, RelationMention, Sentence, ensure_valid
from .scoring import NoScorableAnnotations, ScoreConfig

__all__ = ["PerturbationProfile", "perturb", "SweepRow", "sweep"]

_PROB_FIELDS = (
    "p_ent_type_swap",
    "p_ent_boundary_shift",
    "p_ent_drop",
    "p_ent_spurious",
    "p_rel_type_swap",
    "p_rel_drop",
    "p_rel_spurious",
)


@dataclass(frozen=True)
class PerturbationProfile:
    seed: int = 0
    p_ent_type_swap: float = 0.0
    p_ent_boundary_shift: float = 0.0
    p_ent_drop: float = 0.0
    p_ent_spurious: float = 0.0
    p_rel_type_swap: float = 0.0
    p_rel_drop: float = 0.0
    p_rel_spurious: float = 0.0
    max_spurious_len: int = 3

    def __post_init__(self) -> None:
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ValueError("seed must be an integer")
        for name in _PROB_FIELDS:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")
        if not isinstance(self.max_spurious_len, int) or self.max_spurious_len < 1:
            raise ValueError(f"max_spurious_len must be a positive integer, got {self.max_spurious_len!r}")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PerturbationProfile":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown profile fields: {sorted(unknown)}")
        return cls(**dict(data))


def _stream(seed: int, *path: object) -> random.Random:
    # str seeding hashes via SHA-512 (CPython, seed version 2): stable across
    # runs, platforms and iteration order.
    return random.Random("|".join([str(seed), *map(str, path)]))


def _unique_id(base: str, taken: set[str]) -> str:
    candidate = base
    while candidate in taken:
        candidate += "x"
    return candidate


def perturb(gold: Corpus, profile: PerturbationProfile) -> Corpus:
    """Derive a synthetic prediction corpus from ``gold``.

    The output is always well-formed and token-aligned with the input; an
    all-zero profile returns a corpus structurally equal to the gold.
    """
    ensure_valid(gold)
    ent_types = sorted(gold.entity_types())
    rel_types = sorted(gold.relation_types())
    docs = []
    for doc_index, doc in enumerate(gold.docs):
        sentences = []
        for sent_index, sent in enumerate(doc.sentences):
            n = len(sent.tokens)
            entities: list[Mention] = []
            dropped: set[str] = set()
            for ent_index, m in enumerate(sent.entities):
                rng = _stream(profile.seed, "ent", doc_index, sent_index, ent_index)
                if rng.random() < profile.p_ent_drop:
                    dropped.add(m.id)
                    continue
                entity_type = m.entity_type
                if rng.random() < profile.p_ent_type_swap:
                    others = [t for t in ent_types if t != entity_type]
                    if others:
                        entity_type = rng.choice(others)
                start, end = m.start, m.end
                if rng.random() < profile.p_ent_boundary_shift:
                    side = rng.choice(("start", "end"))
                    delta = rng.choice((-1, 1))
                    new_start, new_end = start, end
                    if side == "start":
                        new_start = min(max(start + delta, 0), n)
                    else:
                        new_end = min(max(end + delta, 0), n)
                    if new_start < new_end:
                        start, end = new_start, new_end
                entities.append(Mention(m.id, start, end, entity_type))
            relations: list[RelationMention] = []
            for rel_index, r in enumerate(sent.relations):
                if r.head in dropped or r.tail in dropped:
                    continue
                rng = _stream(profile.seed, "rel", doc_index, sent_index, rel_index)
                if rng.random() < profile.p_rel_drop:
                    continue
                relation_type = r.relation_type
                if rng.random() < profile.p_rel_type_swap:
                    others = [t for t in rel_types if t != relation_type]
                    if others:
                        relation_type = rng.choice(others)
                relations.append(RelationMention(r.head, r.tail, relation_type))
            rng = _stream(profile.seed, "spurious-ent", doc_index, sent_index)
            if ent_types and rng.random() < profile.p_ent_spurious:
                taken_spans = {(m.start, m.end) for m in entities}
                spans = [
                    (s, s + length)
                    for length in range(1, min(profile.max_spurious_len, n) + 1)
                    for s in range(0, n - length + 1)
                    if (s, s + length) not in taken_spans
                ]
                if spans:
                    start, end = rng.choice(spans)
                    mention_id = _unique_id("sp0", {m.id for m in entities})
                    entities.append(Mention(mention_id, start, end, rng.choice(ent_types)))
            rng = _stream(profile.seed, "spurious-rel", doc_index, sent_index)
            if rel_types and len(entities) >= 2 and rng.random() < profile.p_rel_spurious:
                existing = {(r.head, r.tail, r.relation_type) for r in relations}
                candidates = [
                    (h.id, t.id, rt)
                    for h in entities
                    for t in entities
                    if h.id != t.id
                    for rt in rel_types
                    if (h.id, t.id, rt) not in existing
                ]
                if candidates:
                    head, tail, relation_type = rng.choice(candidates)
                    relations.append(RelationMention(head, tail, relation_type))
            sentences.append(Sentence(sent.tokens, tuple(entities), tuple(relations)))
        docs.append(Document(doc.doc_key, tuple(sentences)))
    return Corpus(gold.name, gold.split, tuple(docs))


class SweepRow(NamedTuple):
    profile: PerturbationProfile
    gap: GapReport | None
    error: str | None


def sweep(
    gold: Corpus,
    profile_grid: Iterable[PerturbationProfile],
    config: ScoreConfig | None = None,
) -> list[SweepRow]:
    """Perturb ``gold`` once per profile and measure the strict/boundaries
    gap of each synthetic prediction. Rows are independent; a row whose gap
    cannot be computed carries the error message instead of failing the
    whole sweep."""
    rows = []
    for profile in profile_grid:
        pred = perturb(gold, profile)
        try:
            rows.append(SweepRow(profile, gap(gold, pred, config), None))
        except NoScorableAnnotations as exc:
            rows.append(SweepRow(profile, None, str(exc)))
    return rows
