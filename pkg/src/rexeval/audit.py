"""Comparability checks for published scores and gap quantification.

Two F1 numbers only compare when everything around them matches: task,
dataset, split, training data, matching criterion, averaging mode and the
label set scored. Every published mix-up this module guards against came
from silently differing in one of those; the checker therefore refuses to
call a pair comparable whenever a field is unknown instead of guessing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .model import Corpus
from .scoring import (
    ALL_CRITERIA,
    BOUNDARIES,
    STRICT,
    EvalReport,
    NoScorableAnnotations,
    ScoreConfig,
    criterion,
    score,
    score_all_settings,
)
import dataclasses

__all__ = [
    "ResultClaim",
    "ComparisonVerdict",
    "ComparedPair",
    "GapReport",
    "FingerprintResult",
    "AveragedScore",
    "compare_claims",
    "compare_all",
    "gap",
    "gap_from_f1",
    "fingerprint_setting",
    "ner_re_average",
    "load_claims",
    "bundled_claims_path",
    "DEFAULT_FINGERPRINT_TOLERANCE",
]

# published tables carry one decimal of a percentage, i.e. steps of 0.001;
# half a step on either side separates adjacent reportable values
DEFAULT_FINGERPRINT_TOLERANCE = 0.0005

_TASKS = ("ner", "re")
_AVERAGES = ("micro", "macro", "unknown")
_SETTINGS = ("strict", "boundaries", "relaxed", "last_token", "unknown")


@dataclass(frozen=True)
class ResultClaim:
    """One published score with the evaluation setting it claims.

    ``value`` is an F1 in [0, 1]; percentage-style values (> 1) are divided
    by 100 on ingest. 'unknown' is an honest and common value for the
    setting fields, and it deliberately poisons comparability.
    """

    label: str
    task: str
    value: float
    dataset: str
    claimed_setting: str = "unknown"
    claimed_average: str = "unknown"
    split: str = "test"
    train_data: str = "unknown"
    excluded_entity_types: frozenset[str] = frozenset()
    note: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "task", self.task.lower())
        if self.task not in _TASKS:
            raise ValueError(f"task must be one of {_TASKS}, got {self.task!r}")
        normalized = self.claimed_setting.lower().replace("-", "_")
        if normalized == "lasttoken":
            normalized = "last_token"
        object.__setattr__(self, "claimed_setting", normalized)
        if self.claimed_setting not in _SETTINGS:
            raise ValueError(f"claimed_setting must be one of {_SETTINGS}, got {self.claimed_setting!r}")
        if self.claimed_average not in _AVERAGES:
            raise ValueError(f"claimed_average must be one of {_AVERAGES}, got {self.claimed_average!r}")
        value = self.value / 100.0 if self.value > 1.0 else self.value
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"value must land in [0, 1] after normalization, got {self.value!r}")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "excluded_entity_types", frozenset(self.excluded_entity_types))

    @classmethod
    def from_dict(cls, data: Mapping) -> "ResultClaim":
        return cls(
            label=data["label"],
            task=data["task"],
            value=data["value"],
            dataset=data["dataset"],
            claimed_setting=data.get("claimed_setting", "unknown"),
            claimed_average=data.get("claimed_average", "unknown"),
            split=data.get("split", "test"),
            train_data=data.get("train_data", "unknown"),
            excluded_entity_types=frozenset(data.get("excluded_entity_types", ())),
            note=data.get("note", ""),
        )


class ComparisonVerdict(NamedTuple):
    comparable: bool
    reasons: tuple[str, ...]


class ComparedPair(NamedTuple):
    a: "ResultClaim"
    b: "ResultClaim"
    verdict: ComparisonVerdict


def _pair(a: str, b: str) -> str:
    return " vs ".join(sorted((a, b)))


def compare_claims(a: ResultClaim, b: ResultClaim) -> ComparisonVerdict:
    """Decide whether two claims may be compared number-to-number.

    The verdict is symmetric in its arguments. Unknown fields yield an
    ``insufficiently_specified`` reason: claims that do not state their
    setting are never ruled comparable."""
    reasons: list[str] = []
    if a.task != b.task:
        reasons.append(f"task mismatch: {_pair(a.task, b.task)}")
    if a.dataset != b.dataset:
        reasons.append(f"dataset mismatch: {_pair(a.dataset, b.dataset)}")
    if a.split != b.split:
        reasons.append(f"split mismatch: {_pair(a.split, b.split)}")
    unknown_setting = sorted(c.label for c in (a, b) if c.claimed_setting == "unknown")
    if unknown_setting:
        reasons.append(f"insufficiently_specified: criterion unknown for {', '.join(unknown_setting)}")
    elif a.claimed_setting != b.claimed_setting:
        reasons.append(f"setting mismatch: {_pair(a.claimed_setting, b.claimed_setting)}")
    unknown_average = sorted(c.label for c in (a, b) if c.claimed_average == "unknown")
    if unknown_average:
        reasons.append(f"insufficiently_specified: averaging unknown for {', '.join(unknown_average)}")
    elif a.claimed_average != b.claimed_average:
        reasons.append(f"average mismatch: {_pair(a.claimed_average, b.claimed_average)}")
    unknown_train = sorted(c.label for c in (a, b) if c.train_data == "unknown")
    if unknown_train:
        reasons.append(f"insufficiently_specified: training data unknown for {', '.join(unknown_train)}")
    elif a.train_data != b.train_data:
        reasons.append(f"train data mismatch: {_pair(a.train_data, b.train_data)}")
    if a.excluded_entity_types != b.excluded_entity_types:
        one = ",".join(sorted(a.excluded_entity_types)) or "none"
        two = ",".join(sorted(b.excluded_entity_types)) or "none"
        reasons.append(f"type-set mismatch: excluded {_pair(one, two)}")
    return ComparisonVerdict(not reasons, tuple(reasons))


def compare_all(claims: Iterable[ResultClaim]) -> list[ComparedPair]:
    """Verdicts for every pair of claims that targets the same leaderboard.

    Claims are grouped by (task, dataset, split); only within-group pairs
    are compared, in file order. Cross-benchmark pairs are not mistakes
    anyone publishes -- enumerating them would bury the findings that
    matter."""
    groups: dict[tuple[str, str, str], list[ResultClaim]] = {}
    for c in claims:
        groups.setdefault((c.task, c.dataset, c.split), []).append(c)
    pairs = []
    for group in groups.values():
        for i, a in enumerate(group):
            for b in group[i + 1 :]:
                pairs.append(ComparedPair(a, b, compare_claims(a, b)))
    return pairs


@dataclass(frozen=True)
class GapReport:
    """Inflation incurred by scoring with boundaries instead of strict."""

    strict_f1: float
    boundaries_f1: float
    absolute_gap: float = field(init=False)
    relative_overestimation: float = field(init=False)

    def __post_init__(self) -> None:
        if self.boundaries_f1 < self.strict_f1:
            raise ValueError(
                "boundaries F1 cannot be below strict F1 "
                f"({self.boundaries_f1!r} < {self.strict_f1!r}); check the inputs"
            )
        absolute = self.boundaries_f1 - self.strict_f1
        if self.strict_f1 > 0.0:
            relative = absolute / self.strict_f1
        else:
            relative = 0.0 if absolute == 0.0 else math.inf
        object.__setattr__(self, "absolute_gap", absolute)
        object.__setattr__(self, "relative_overestimation", relative)

    def to_dict(self) -> dict:
        return {
            "strict_f1": self.strict_f1,
            "boundaries_f1": self.boundaries_f1,
            "absolute_gap": self.absolute_gap,
            "relative_overestimation": self.relative_overestimation,
        }


def gap_from_f1(strict_f1: float, boundaries_f1: float) -> GapReport:
    return GapReport(strict_f1, boundaries_f1)


def gap(
    gold: Corpus,
    pred: Corpus,
    config: ScoreConfig | None = None,
    *,
    allow_misaligned: bool = False,
) -> GapReport:
    """Measure the strict/boundaries RE gap of one (gold, pred) pair."""
    base = config or ScoreConfig()
    strict_report = score(
        gold, pred, dataclasses.replace(base, criterion=STRICT), allow_misaligned=allow_misaligned
    )
    if strict_report.re.overall.tp + strict_report.re.overall.fn == 0:
        raise NoScorableAnnotations("gold corpus contains no relations after exclusions")
    boundaries_report = score(
        gold, pred, dataclasses.replace(base, criterion=BOUNDARIES), allow_misaligned=allow_misaligned
    )
    return GapReport(strict_report.re.overall.f1, boundaries_report.re.overall.f1)


@dataclass(frozen=True)
class FingerprintResult:
    """Which criteria could have produced a reported number.

    ``scores`` holds the F1 actually computed under each criterion;
    ``matches`` the criteria within tolerance of the reported value.
    """

    scores: dict[str, float]
    matches: tuple[str, ...]
    verdict: str
    mismatch_with_claim: bool


def fingerprint_setting(
    gold: Corpus,
    pred: Corpus,
    reported: ResultClaim,
    tolerance: float = DEFAULT_FINGERPRINT_TOLERANCE,
    *,
    config: ScoreConfig | None = None,
    allow_misaligned: bool = False,
) -> FingerprintResult:
    """Recover the evaluation setting a reported score was computed in.

    Scores the prediction under every criterion and returns the ones whose
    F1 lands within ``tolerance`` of the reported value. A claim whose
    stated setting is not among them is flagged: either the number or the
    stated setting is wrong. Averaging and type exclusions are taken from
    the claim (micro when unknown) unless ``config`` overrides them.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    if config is None:
        config = ScoreConfig(
            average=reported.claimed_average if reported.claimed_average != "unknown" else "micro",
            excluded_entity_types=reported.excluded_entity_types,
        )
    reports = score_all_settings(gold, pred, config, allow_misaligned=allow_misaligned)
    scores = {
        kind: (report.ner if reported.task == "ner" else report.re).overall.f1
        for kind, report in reports.items()
    }
    matches = tuple(c.kind for c in ALL_CRITERIA if abs(scores[c.kind] - reported.value) <= tolerance)
    claimed = reported.claimed_setting
    mismatch = claimed != "unknown" and claimed not in matches
    if len(matches) == len(ALL_CRITERIA):
        verdict = "indeterminate"
    elif mismatch:
        verdict = "mismatch_with_claim"
    elif not matches:
        verdict = "no_match"
    else:
        verdict = "consistent"
    return FingerprintResult(scores=scores, matches=matches, verdict=verdict, mismatch_with_claim=mismatch)


class AveragedScore(NamedTuple):
    value: float
    discouraged: bool


def ner_re_average(report: EvalReport) -> AveragedScore:
    """Mean of NER F1 and RE F1 -- always flagged as discouraged.

    An end-to-end RE score already pays for every NER error; averaging the
    two double-counts entity mistakes and rewards trading RE quality for
    NER quality. Provided only so the number can be reproduced when
    auditing work that reports it."""
    return AveragedScore((report.ner.overall.f1 + report.re.overall.f1) / 2.0, True)


def load_claims(source: str | Path) -> list[ResultClaim]:
    with open(source, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("claims file must contain a JSON array of claim objects")
    return [ResultClaim.from_dict(record) for record in data]


def bundled_claims_path() -> Path:
    """Path of the packaged demonstration claims file (published end-to-end
    RE results with their curated evaluation settings)."""
    return Path(__file__).parent / "data" / "published_claims.json"
