"""Dataset statistics, reference-manifest integrity checks and
relation/argument-type mapping analysis.

Published counts for a corpus are the only integrity oracle available when
the corpus itself cannot be redistributed: if the sentence, token, entity
and relation counts of a local copy match the reference exactly, the copy
is at least the same size as what the reference describes. Comparison is
deliberately exact; a tolerance would hide precisely the silent drift this
module exists to catch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple

from .model import Corpus, ensure_valid

__all__ = [
    "StatsReport",
    "SplitCounts",
    "ReferenceManifest",
    "Discrepancy",
    "TruncationFinding",
    "MappingComplexity",
    "compute_stats",
    "check_integrity",
    "detect_truncation",
    "cooccurrence_matrix",
    "mapping_complexity",
    "load_manifest",
    "bundled_manifest_path",
    "bundled_manifest",
]

_COUNT_FIELDS = ("documents", "sentences", "tokens", "entities", "relations")


@dataclass(frozen=True)
class StatsReport:
    name: str
    split: str | None
    documents: int
    sentences: int
    tokens: int
    entities: int
    relations: int
    entity_types: dict[str, int] = field(default_factory=dict)
    relation_types: dict[str, int] = field(default_factory=dict)
    entities_per_sentence: dict[int, int] = field(default_factory=dict)
    relations_per_sentence: dict[int, int] = field(default_factory=dict)
    zero_relation_fraction: float = 0.0
    overlapping_mentions: int = 0
    nested_mentions: int = 0
    cooccurrence: dict[tuple[str, str, str], int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "split": self.split,
            "documents": self.documents,
            "sentences": self.sentences,
            "tokens": self.tokens,
            "entities": self.entities,
            "relations": self.relations,
            "entity_types": dict(sorted(self.entity_types.items())),
            "relation_types": dict(sorted(self.relation_types.items())),
            "entities_per_sentence": {str(k): v for k, v in sorted(self.entities_per_sentence.items())},
            "relations_per_sentence": {str(k): v for k, v in sorted(self.relations_per_sentence.items())},
            "zero_relation_fraction": self.zero_relation_fraction,
            "overlapping_mentions": self.overlapping_mentions,
            "nested_mentions": self.nested_mentions,
            "cooccurrence": {
                f"{r} ({h} -> {t})": count for (r, h, t), count in sorted(self.cooccurrence.items())
            },
        }


def compute_stats(corpus: Corpus) -> StatsReport:
    """All reportable statistics of one corpus (one split). Deterministic and
    invariant under document order."""
    ensure_valid(corpus)
    entity_types: dict[str, int] = {}
    relation_types: dict[str, int] = {}
    ent_hist: dict[int, int] = {}
    rel_hist: dict[int, int] = {}
    coocc: dict[tuple[str, str, str], int] = {}
    tokens = entities = relations = sentences = 0
    zero_relation = 0
    overlapping = nested = 0
    for _, _, sent in corpus.iter_sentences():
        sentences += 1
        tokens += len(sent.tokens)
        entities += len(sent.entities)
        relations += len(sent.relations)
        ent_hist[len(sent.entities)] = ent_hist.get(len(sent.entities), 0) + 1
        rel_hist[len(sent.relations)] = rel_hist.get(len(sent.relations), 0) + 1
        if not sent.relations:
            zero_relation += 1
        for m in sent.entities:
            entity_types[m.entity_type] = entity_types.get(m.entity_type, 0) + 1
        by_id = {m.id: m for m in sent.entities}
        for r in sent.relations:
            relation_types[r.relation_type] = relation_types.get(r.relation_type, 0) + 1
            key = (r.relation_type, by_id[r.head].entity_type, by_id[r.tail].entity_type)
            coocc[key] = coocc.get(key, 0) + 1
        for i, a in enumerate(sent.entities):
            for b in sent.entities[i + 1 :]:
                if a.overlaps(b):
                    overlapping += 1
                if a.contains(b) or b.contains(a):
                    nested += 1
    return StatsReport(
        name=corpus.name,
        split=corpus.split,
        documents=len(corpus.docs),
        sentences=sentences,
        tokens=tokens,
        entities=entities,
        relations=relations,
        entity_types=entity_types,
        relation_types=relation_types,
        entities_per_sentence=ent_hist,
        relations_per_sentence=rel_hist,
        zero_relation_fraction=(zero_relation / sentences) if sentences else 0.0,
        overlapping_mentions=overlapping,
        nested_mentions=nested,
        cooccurrence=coocc,
    )


class SplitCounts(NamedTuple):
    """Expected counts for one split; None means the reference does not
    report that figure."""

    documents: int | None = None
    sentences: int | None = None
    tokens: int | None = None
    entities: int | None = None
    relations: int | None = None


@dataclass(frozen=True)
class ReferenceManifest:
    name: str
    source: str
    all_relational: bool
    splits: dict[str, SplitCounts] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ReferenceManifest":
        splits = {}
        for split_name, counts in data.get("splits", {}).items():
            unknown = set(counts) - set(_COUNT_FIELDS)
            if unknown:
                raise ValueError(f"manifest split {split_name!r} has unknown fields: {sorted(unknown)}")
            for fname, value in counts.items():
                if value is not None and (isinstance(value, bool) or not isinstance(value, int) or value < 0):
                    raise ValueError(f"manifest count {split_name}.{fname} must be a non-negative integer")
            splits[split_name] = SplitCounts(**{f: counts.get(f) for f in _COUNT_FIELDS})
        return cls(
            name=data["name"],
            source=data.get("source", ""),
            all_relational=bool(data.get("all_relational", False)),
            splits=splits,
        )


def load_manifest(path: str | Path) -> ReferenceManifest:
    with open(path, encoding="utf-8") as fh:
        return ReferenceManifest.from_dict(json.load(fh))


def bundled_manifest_path(name: str) -> Path:
    """Path of a manifest shipped with the package ('conll04' or 'ace05')."""
    path = Path(__file__).parent / "data" / f"manifest_{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled manifest named {name!r}")
    return path


def bundled_manifest(name: str) -> ReferenceManifest:
    return load_manifest(bundled_manifest_path(name))


class Discrepancy(NamedTuple):
    field: str
    expected: int
    actual: int
    delta: int


def check_integrity(report: StatsReport, manifest: ReferenceManifest) -> list[Discrepancy]:
    """Compare a stats report against the reference counts of its split.

    One Discrepancy per differing count (delta = actual - expected); the
    empty list means every count the manifest specifies matches exactly.
    Reports without a split are compared against the manifest's 'total'
    entry when present.
    """
    split = report.split if report.split is not None else "total"
    if split not in manifest.splits:
        raise ValueError(f"manifest {manifest.name!r} has no counts for split {split!r}")
    expected = manifest.splits[split]
    discrepancies = []
    for fname in _COUNT_FIELDS:
        want = getattr(expected, fname)
        if want is None:
            continue
        got = getattr(report, fname)
        if got != want:
            discrepancies.append(Discrepancy(fname, want, got, got - want))
    return discrepancies


class TruncationFinding(NamedTuple):
    zero_relation_fraction: float
    suspicious: bool
    note: str


def detect_truncation(report: StatsReport, all_relational: bool | None = None) -> TruncationFinding:
    """Flag corpora that look truncated to relation-bearing sentences.

    A zero fraction of relation-free sentences is only suspicious for
    datasets declared (via the manifest flag) to contain such sentences;
    for corpora built to be all-relational it is simply expected.
    ``all_relational=None`` means no declaration is available, so no
    verdict beyond the raw fraction is possible.
    """
    fraction = report.zero_relation_fraction
    if report.sentences == 0:
        return TruncationFinding(fraction, False, "empty corpus")
    if fraction > 0.0:
        return TruncationFinding(fraction, False, f"{fraction:.1%} of sentences have no relation")
    if all_relational is None:
        return TruncationFinding(
            fraction, False, "no relation-free sentences; dataset composition undeclared, cannot judge"
        )
    if all_relational:
        return TruncationFinding(fraction, False, "no relation-free sentences, as the dataset prescribes")
    return TruncationFinding(
        fraction,
        True,
        "dataset is declared to contain relation-free sentences but none are present; "
        "corpus looks truncated to relation-bearing sentences",
    )


def cooccurrence_matrix(corpus: Corpus) -> dict[tuple[str, str, str], int]:
    """Occurrences of each (relation type, head entity type, tail entity
    type) combination, counting instances (duplicates included)."""
    return compute_stats(corpus).cooccurrence


class MappingComplexity(NamedTuple):
    pairs_per_relation: dict[str, int]
    bijective: bool


def mapping_complexity(coocc: Mapping[tuple[str, str, str], int]) -> MappingComplexity:
    """How tightly relation types determine their argument types.

    The mapping is bijective when every relation type co-occurs with exactly
    one (head type, tail type) pair and no two relation types share a pair;
    an empty matrix is vacuously bijective. A bijective mapping means
    argument typing carries no information beyond the relation type, which
    is why criteria that ignore argument types barely change scores on such
    data."""
    pairs: dict[str, set[tuple[str, str]]] = {}
    for (relation_type, head_type, tail_type), count in coocc.items():
        if count > 0:
            pairs.setdefault(relation_type, set()).add((head_type, tail_type))
    pair_counts = {r: len(p) for r, p in sorted(pairs.items())}
    all_pairs = [p for ps in pairs.values() for p in ps]
    bijective = all(n == 1 for n in pair_counts.values()) and len(all_pairs) == len(set(all_pairs))
    return MappingComplexity(pair_counts, bijective)
