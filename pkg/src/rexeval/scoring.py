"""Matching criteria and precision/recall/F1 computation for NER and RE.

Four criteria are implemented. For relation arguments they require:

* strict      -- exact boundaries and exact entity type;
* boundaries  -- exact boundaries, entity type ignored;
* last_token  -- only the final token index must match, type ignored
                 (a diagnostic reproducing a published, looser-than-
                 boundaries setup; never use it to report results);
* relaxed     -- at least one shared token and the gold entity type.

NER itself is always scored on exact typed spans except under relaxed,
where token overlap with a same-type prediction suffices. The criteria
therefore only change RE argument matching for strict/boundaries/
last_token, whose NER counts coincide by construction.

The relaxed lift to RE is not a community standard; reports produced under
it carry ``non_standard = True``. When several predictions could satisfy a
relaxed match, gold items are matched greedily in (leftmost start, then
longest) argument order against candidates in the same order, each side
used at most once. Candidate order is taken from the predicted relation's
stored orientation.

All counting happens over deduplicated annotation identities: writing the
same mention or relation twice never changes a score.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .ingest import AlignmentReport, align
from .model import Corpus, Document, Mention, Sentence, ensure_valid

__all__ = [
    "Criterion",
    "STRICT",
    "BOUNDARIES",
    "RELAXED",
    "LAST_TOKEN",
    "ALL_CRITERIA",
    "ScoreConfig",
    "PRF",
    "TaskScores",
    "EvalReport",
    "AlignmentError",
    "NoScorableAnnotations",
    "ConfigWarning",
    "match_ner",
    "match_re",
    "score",
    "score_all_settings",
]

_KINDS = ("strict", "boundaries", "relaxed", "last_token")


@dataclass(frozen=True)
class Criterion:
    """One matching criterion. ``diagnostic`` marks settings that exist to
    detect published mistakes rather than to report results; last_token is
    always diagnostic."""

    kind: str
    diagnostic: bool = False

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown criterion kind {self.kind!r} (expected one of {_KINDS})")
        if self.kind == "last_token":
            object.__setattr__(self, "diagnostic", True)


STRICT = Criterion("strict")
BOUNDARIES = Criterion("boundaries")
RELAXED = Criterion("relaxed")
LAST_TOKEN = Criterion("last_token")
ALL_CRITERIA = (STRICT, BOUNDARIES, RELAXED, LAST_TOKEN)

_BY_KIND = {c.kind: c for c in ALL_CRITERIA}


def criterion(kind: str) -> Criterion:
    """Look up a criterion by kind name ('last-token' and 'lasttoken' are
    accepted spellings of 'last_token')."""
    normalized = kind.strip().lower().replace("-", "_").replace(" ", "_")
    if normalized == "lasttoken":
        normalized = "last_token"
    if normalized not in _BY_KIND:
        raise ValueError(f"unknown criterion {kind!r} (expected one of {_KINDS})")
    return _BY_KIND[normalized]


class ConfigWarning(UserWarning):
    """Non-fatal configuration oddity (e.g. excluding a type the gold data
    does not contain)."""


@dataclass(frozen=True)
class ScoreConfig:
    criterion: Criterion = STRICT
    average: str = "micro"
    excluded_entity_types: frozenset[str] = frozenset()
    excluded_relation_types: frozenset[str] = frozenset()
    symmetric_types: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.average not in ("micro", "macro"):
            raise ValueError(f"average must be 'micro' or 'macro', got {self.average!r}")
        for attr in ("excluded_entity_types", "excluded_relation_types", "symmetric_types"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.kind,
            "diagnostic": self.criterion.diagnostic,
            "average": self.average,
            "excluded_entity_types": sorted(self.excluded_entity_types),
            "excluded_relation_types": sorted(self.excluded_relation_types),
            "symmetric_types": sorted(self.symmetric_types),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ScoreConfig":
        return cls(
            criterion=criterion(data.get("criterion", "strict")),
            average=data.get("average", "micro"),
            excluded_entity_types=frozenset(data.get("excluded_entity_types", ())),
            excluded_relation_types=frozenset(data.get("excluded_relation_types", ())),
            symmetric_types=frozenset(data.get("symmetric_types", ())),
        )


@dataclass(frozen=True)
class PRF:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "PRF":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(tp, fp, fn, precision, recall, f1)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> "PRF":
        return cls(**{k: data[k] for k in ("tp", "fp", "fn", "precision", "recall", "f1")})


@dataclass(frozen=True)
class TaskScores:
    """Scores of one task (NER or RE): an aggregate cell plus per-type cells.

    ``overall.tp/fp/fn`` are always the summed counts. Under micro
    averaging the aggregate P/R/F1 derive from those sums; under macro they
    are arithmetic means of the per-type values over the types present in
    gold (after exclusions). Types found only in predictions contribute
    false positives to the micro sums but no macro cell; they are listed in
    ``spurious_types``.
    """

    overall: PRF
    per_type: dict[str, PRF] = field(default_factory=dict)
    spurious_types: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "overall": self.overall.to_dict(),
            "per_type": {t: prf.to_dict() for t, prf in sorted(self.per_type.items())},
            "spurious_types": list(self.spurious_types),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "TaskScores":
        return cls(
            overall=PRF.from_dict(data["overall"]),
            per_type={t: PRF.from_dict(d) for t, d in data["per_type"].items()},
            spurious_types=tuple(data.get("spurious_types", ())),
        )


@dataclass(frozen=True)
class EvalReport:
    config: ScoreConfig
    ner: TaskScores
    re: TaskScores
    non_standard: bool = False

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "ner": self.ner.to_dict(),
            "re": self.re.to_dict(),
            "non_standard": self.non_standard,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "EvalReport":
        return cls(
            config=ScoreConfig.from_dict(data["config"]),
            ner=TaskScores.from_dict(data["ner"]),
            re=TaskScores.from_dict(data["re"]),
            non_standard=bool(data.get("non_standard", False)),
        )


class AlignmentError(ValueError):
    """Gold and prediction corpora do not cover the same sentences; scoring
    them would compare different data."""

    def __init__(self, report: AlignmentReport):
        self.report = report
        kinds: dict[str, int] = {}
        for m in report.mismatches:
            kinds[m.reason] = kinds.get(m.reason, 0) + 1
        summary = ", ".join(f"{k}×{v}" for k, v in sorted(kinds.items()))
        super().__init__(f"gold/prediction corpora are not aligned: {summary}")


class NoScorableAnnotations(ValueError):
    def __init__(self, detail: str = ""):
        message = "no scorable annotations"
        super().__init__(f"{message}: {detail}" if detail else message)


def _check_aligned(gold: Corpus, pred: Corpus) -> None:
    report = align(gold, pred)
    if not report.ok:
        raise AlignmentError(report)


def _overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def _paired_sentences(gold: Corpus, pred: Corpus):
    """Yield (gold sentence | None, pred sentence | None) pairs covering both
    corpora, paired by (doc_key, sentence index). None on one side means the
    other side's annotations have no counterpart (possible only when scoring
    proceeds despite a failed alignment)."""
    pred_docs = {d.doc_key: d for d in pred.docs}
    gold_keys = {d.doc_key for d in gold.docs}
    for doc in gold.docs:
        pdoc = pred_docs.get(doc.doc_key)
        n_pred = len(pdoc.sentences) if pdoc else 0
        for idx, gsent in enumerate(doc.sentences):
            yield gsent, (pdoc.sentences[idx] if idx < n_pred else None)
        if pdoc is not None:
            for idx in range(len(doc.sentences), n_pred):
                yield None, pdoc.sentences[idx]
    for doc in pred.docs:
        if doc.doc_key not in gold_keys:
            for sent in doc.sentences:
                yield None, sent


def _ner_counts(gold: Corpus, pred: Corpus, crit: Criterion) -> dict[str, list[int]]:
    counts: dict[str, list[int]] = {}

    def cell(label: str) -> list[int]:
        return counts.setdefault(label, [0, 0, 0])

    for gsent, psent in _paired_sentences(gold, pred):
        gset = {(m.start, m.end, m.entity_type) for m in gsent.entities} if gsent else set()
        pset = {(m.start, m.end, m.entity_type) for m in psent.entities} if psent else set()
        if crit.kind == "relaxed":
            for g in gset:
                hit = any(p[2] == g[2] and _overlap((g[0], g[1]), (p[0], p[1])) for p in pset)
                cell(g[2])[0 if hit else 2] += 1
            for p in pset:
                hit = any(g[2] == p[2] and _overlap((g[0], g[1]), (p[0], p[1])) for g in gset)
                if not hit:
                    cell(p[2])[1] += 1
        else:
            for g in gset & pset:
                cell(g[2])[0] += 1
            for p in pset - gset:
                cell(p[2])[1] += 1
            for g in gset - pset:
                cell(g[2])[2] += 1
    return counts


def _project(m: Mention, kind: str) -> tuple:
    if kind == "strict":
        return (m.start, m.end, m.entity_type)
    if kind == "boundaries":
        return (m.start, m.end)
    if kind == "last_token":
        return (m.end - 1,)
    raise ValueError(kind)


def _sentence_relation_items(sent: Sentence) -> list[tuple[str, Mention, Mention]]:
    by_id = {m.id: m for m in sent.entities}
    items = []
    seen = set()
    for r in sent.relations:
        h, t = by_id[r.head], by_id[r.tail]
        identity = (r.relation_type, (h.start, h.end, h.entity_type), (t.start, t.end, t.entity_type))
        if identity in seen:
            continue
        seen.add(identity)
        items.append((r.relation_type, h, t))
    return items


def _projected_relation_keys(corpus: Corpus, kind: str, symmetric: frozenset[str]) -> set[tuple]:
    keys: set[tuple] = set()
    for doc_key, sent_index, sent in corpus.iter_sentences():
        by_id = {m.id: m for m in sent.entities}
        for r in sent.relations:
            h = _project(by_id[r.head], kind)
            t = _project(by_id[r.tail], kind)
            if r.relation_type in symmetric and t < h:
                h, t = t, h
            keys.add((doc_key, sent_index, r.relation_type, h, t))
    return keys


def _span_order(h: Mention, t: Mention) -> tuple:
    return (h.start, -(h.end - h.start), t.start, -(t.end - t.start))


def _relaxed_arg_match(pred_arg: Mention, gold_arg: Mention) -> bool:
    return pred_arg.entity_type == gold_arg.entity_type and _overlap(
        (pred_arg.start, pred_arg.end), (gold_arg.start, gold_arg.end)
    )


def _relaxed_rel_match(
    g: tuple[str, Mention, Mention], p: tuple[str, Mention, Mention], symmetric: frozenset[str]
) -> bool:
    if g[0] != p[0]:
        return False
    if _relaxed_arg_match(p[1], g[1]) and _relaxed_arg_match(p[2], g[2]):
        return True
    if g[0] in symmetric:
        return _relaxed_arg_match(p[1], g[2]) and _relaxed_arg_match(p[2], g[1])
    return False


def _re_counts(
    gold: Corpus, pred: Corpus, crit: Criterion, symmetric: frozenset[str]
) -> dict[str, list[int]]:
    counts: dict[str, list[int]] = {}

    def cell(label: str) -> list[int]:
        return counts.setdefault(label, [0, 0, 0])

    if crit.kind == "relaxed":
        for gsent, psent in _paired_sentences(gold, pred):
            grels = _sentence_relation_items(gsent) if gsent else []
            grels.sort(key=lambda it: _span_order(it[1], it[2]))
            prels = _sentence_relation_items(psent) if psent else []
            used = [False] * len(prels)
            for g in grels:
                candidates = [
                    j for j, p in enumerate(prels) if not used[j] and _relaxed_rel_match(g, p, symmetric)
                ]
                if candidates:
                    best = min(candidates, key=lambda j: _span_order(prels[j][1], prels[j][2]))
                    used[best] = True
                    cell(g[0])[0] += 1
                else:
                    cell(g[0])[2] += 1
            for j, p in enumerate(prels):
                if not used[j]:
                    cell(p[0])[1] += 1
    else:
        gkeys = _projected_relation_keys(gold, crit.kind, symmetric)
        pkeys = _projected_relation_keys(pred, crit.kind, symmetric)
        for key in gkeys & pkeys:
            cell(key[2])[0] += 1
        for key in pkeys - gkeys:
            cell(key[2])[1] += 1
        for key in gkeys - pkeys:
            cell(key[2])[2] += 1
    return counts


def match_ner(gold: Corpus, pred: Corpus, crit: Criterion = STRICT) -> dict[str, tuple[int, int, int]]:
    """Per-entity-type (tp, fp, fn). Rejects unaligned corpora."""
    _check_aligned(gold, pred)
    return {t: tuple(c) for t, c in _ner_counts(gold, pred, crit).items()}


def match_re(
    gold: Corpus,
    pred: Corpus,
    crit: Criterion = STRICT,
    symmetric_types: Iterable[str] = (),
) -> dict[str, tuple[int, int, int]]:
    """Per-relation-type (tp, fp, fn). Rejects unaligned corpora."""
    _check_aligned(gold, pred)
    return {t: tuple(c) for t, c in _re_counts(gold, pred, crit, frozenset(symmetric_types)).items()}


def _apply_exclusions(corpus: Corpus, config: ScoreConfig) -> Corpus:
    if not config.excluded_entity_types and not config.excluded_relation_types:
        return corpus
    docs = []
    for doc in corpus.docs:
        sentences = []
        for sent in doc.sentences:
            entities = tuple(m for m in sent.entities if m.entity_type not in config.excluded_entity_types)
            kept_ids = {m.id for m in entities}
            relations = tuple(
                r
                for r in sent.relations
                if r.relation_type not in config.excluded_relation_types
                and r.head in kept_ids
                and r.tail in kept_ids
            )
            sentences.append(Sentence(sent.tokens, entities, relations))
        docs.append(Document(doc.doc_key, tuple(sentences)))
    return Corpus(corpus.name, corpus.split, tuple(docs))


def _warn_unknown_exclusions(gold: Corpus, config: ScoreConfig) -> None:
    unknown_ents = config.excluded_entity_types - gold.entity_types()
    unknown_rels = config.excluded_relation_types - gold.relation_types()
    for t in sorted(unknown_ents):
        warnings.warn(f"excluded entity type {t!r} does not occur in gold", ConfigWarning, stacklevel=3)
    for t in sorted(unknown_rels):
        warnings.warn(f"excluded relation type {t!r} does not occur in gold", ConfigWarning, stacklevel=3)


def _task_scores(counts: dict[str, list[int]], gold_types: set[str], average: str) -> TaskScores:
    per_type = {t: PRF.from_counts(*c) for t, c in counts.items()}
    tp = sum(c[0] for c in counts.values())
    fp = sum(c[1] for c in counts.values())
    fn = sum(c[2] for c in counts.values())
    spurious = tuple(sorted(set(counts) - gold_types))
    if average == "micro":
        overall = PRF.from_counts(tp, fp, fn)
    else:
        macro_cells = [per_type[t] for t in sorted(gold_types) if t in per_type]
        k = len(macro_cells)
        precision = sum(c.precision for c in macro_cells) / k if k else 0.0
        recall = sum(c.recall for c in macro_cells) / k if k else 0.0
        f1 = sum(c.f1 for c in macro_cells) / k if k else 0.0
        overall = PRF(tp, fp, fn, precision, recall, f1)
    return TaskScores(overall=overall, per_type=per_type, spurious_types=spurious)


def score(
    gold: Corpus,
    pred: Corpus,
    config: ScoreConfig | None = None,
    *,
    allow_misaligned: bool = False,
) -> EvalReport:
    """Score ``pred`` against ``gold`` under one configuration.

    Type exclusions are applied to both corpora before any counting:
    excluded mentions disappear, and so do relations that reference them or
    whose own type is excluded. Scoring refuses to run on corpora whose
    token sequences differ (see ingest.align) unless ``allow_misaligned``
    is set, and raises NoScorableAnnotations when nothing remains in gold
    after exclusions.
    """
    config = config or ScoreConfig()
    ensure_valid(gold)
    ensure_valid(pred)
    if not allow_misaligned:
        _check_aligned(gold, pred)
    _warn_unknown_exclusions(gold, config)
    gold_f = _apply_exclusions(gold, config)
    pred_f = _apply_exclusions(pred, config)
    gold_ent_types = gold_f.entity_types()
    gold_rel_types = gold_f.relation_types()
    if not gold_ent_types and not gold_rel_types:
        raise NoScorableAnnotations("gold corpus is empty after exclusions")
    ner_counts = _ner_counts(gold_f, pred_f, config.criterion)
    re_counts = _re_counts(gold_f, pred_f, config.criterion, config.symmetric_types)
    return EvalReport(
        config=config,
        ner=_task_scores(ner_counts, gold_ent_types, config.average),
        re=_task_scores(re_counts, gold_rel_types, config.average),
        non_standard=config.criterion.kind == "relaxed",
    )


def score_all_settings(
    gold: Corpus,
    pred: Corpus,
    base_config: ScoreConfig | None = None,
    *,
    allow_misaligned: bool = False,
) -> dict[str, EvalReport]:
    """Score under all four criteria with the rest of the configuration
    shared. Strict is the setting to report; the others are for comparison
    and for detecting which setting someone else's number was computed in."""
    base = base_config or ScoreConfig()
    return {
        crit.kind: score(
            gold, pred, dataclasses.replace(base, criterion=crit), allow_misaligned=allow_misaligned
        )
        for crit in ALL_CRITERIA
    }
