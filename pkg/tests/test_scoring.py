import dataclasses
import json

import pytest

from rexeval.model import Corpus, Document, Mention, RelationMention, Sentence
from rexeval.scoring import (
    ALL_CRITERIA,
    BOUNDARIES,
    LAST_TOKEN,
    RELAXED,
    STRICT,
    AlignmentError,
    ConfigWarning,
    Criterion,
    EvalReport,
    NoScorableAnnotations,
    ScoreConfig,
    criterion,
    match_ner,
    match_re,
    score,
    score_all_settings,
)

from corpusgen import random_corpus_with_relations, random_profile
from rexeval.perturb import perturb


def one_sentence(tokens, entities, relations=()):
    return Corpus("t", "test", (Document("d0", (Sentence(tuple(tokens), tuple(entities), tuple(relations)),)),))


TOKENS = ["w0", "w1", "w2", "w3", "w4", "w5"]


def test_criterion_constants():
    assert STRICT.kind == "strict" and not STRICT.diagnostic
    assert LAST_TOKEN.diagnostic
    assert Criterion("last_token").diagnostic  # forced on
    assert criterion("last-token") is LAST_TOKEN
    assert criterion("Boundaries") is BOUNDARIES
    with pytest.raises(ValueError):
        Criterion("fuzzy")


def test_score_config_rejects_bad_average():
    with pytest.raises(ValueError):
        ScoreConfig(average="weighted")


# --- NER matching, hand-enumerated ------------------------------------------

def test_ner_identity(mini_gold):
    counts = match_ner(mini_gold, mini_gold, STRICT)
    assert counts == {"Peop": (2, 0, 0), "Org": (2, 0, 0), "Loc": (2, 0, 0)}


def test_ner_partial_span_strict_vs_relaxed():
    gold = one_sentence(TOKENS, [Mention("e0", 0, 2, "Peop")])
    pred = one_sentence(TOKENS, [Mention("e0", 1, 2, "Peop")])
    assert match_ner(gold, pred, STRICT) == {"Peop": (0, 1, 1)}
    assert match_ner(gold, pred, RELAXED) == {"Peop": (1, 0, 0)}


def test_ner_wrong_type_fails_both_criteria():
    gold = one_sentence(TOKENS, [Mention("e0", 0, 2, "Peop")])
    pred = one_sentence(TOKENS, [Mention("e0", 0, 2, "Org")])
    assert match_ner(gold, pred, STRICT) == {"Peop": (0, 0, 1), "Org": (0, 1, 0)}
    assert match_ner(gold, pred, RELAXED) == {"Peop": (0, 0, 1), "Org": (0, 1, 0)}


def test_ner_counts_identical_across_exact_criteria(mini_gold, mini_pred_argtype):
    strict = match_ner(mini_gold, mini_pred_argtype, STRICT)
    assert match_ner(mini_gold, mini_pred_argtype, BOUNDARIES) == strict
    assert match_ner(mini_gold, mini_pred_argtype, LAST_TOKEN) == strict


def test_ner_rejects_unaligned(mini_gold, conll_like):
    with pytest.raises(AlignmentError):
        match_ner(mini_gold, conll_like)


# --- RE matching, hand-enumerated -------------------------------------------

def re_pair(gold_args, pred_args, rel="Work_For"):
    gold = one_sentence(TOKENS, gold_args, [RelationMention("e0", "e1", rel)])
    pred = one_sentence(TOKENS, pred_args, [RelationMention("e0", "e1", rel)])
    return gold, pred


def test_re_argument_type_error_strict_vs_boundaries():
    gold, pred = re_pair(
        [Mention("e0", 0, 1, "Peop"), Mention("e1", 3, 4, "Org")],
        [Mention("e0", 0, 1, "Peop"), Mention("e1", 3, 4, "Other")],
    )
    assert match_re(gold, pred, STRICT) == {"Work_For": (0, 1, 1)}
    assert match_re(gold, pred, BOUNDARIES) == {"Work_For": (1, 0, 0)}


def test_re_identity_under_every_criterion(mini_gold):
    for crit in ALL_CRITERIA:
        counts = match_re(mini_gold, mini_gold, crit)
        assert counts == {"Work_For": (1, 0, 0), "OrgBased_In": (1, 0, 0), "Live_In": (1, 0, 0)}


def test_re_shifted_start_same_last_token():
    gold, pred = re_pair(
        [Mention("e0", 0, 2, "Peop"), Mention("e1", 3, 4, "Org")],
        [Mention("e0", 1, 2, "Peop"), Mention("e1", 3, 4, "Org")],
    )
    assert match_re(gold, pred, STRICT) == {"Work_For": (0, 1, 1)}
    assert match_re(gold, pred, LAST_TOKEN) == {"Work_For": (1, 0, 0)}
    assert match_re(gold, pred, RELAXED) == {"Work_For": (1, 0, 0)}


def test_re_relaxed_needs_gold_argument_type():
    gold, pred = re_pair(
        [Mention("e0", 0, 2, "Peop"), Mention("e1", 3, 4, "Org")],
        [Mention("e0", 1, 2, "Loc"), Mention("e1", 3, 4, "Org")],
    )
    assert match_re(gold, pred, RELAXED) == {"Work_For": (0, 1, 1)}


def test_re_symmetric_type_matches_either_direction():
    gold = one_sentence(
        TOKENS,
        [Mention("e0", 0, 1, "Peop"), Mention("e1", 3, 4, "Peop")],
        [RelationMention("e0", "e1", "Sibling")],
    )
    pred = one_sentence(
        TOKENS,
        [Mention("e0", 0, 1, "Peop"), Mention("e1", 3, 4, "Peop")],
        [RelationMention("e1", "e0", "Sibling")],
    )
    assert match_re(gold, pred, STRICT) == {"Sibling": (0, 1, 1)}
    assert match_re(gold, pred, STRICT, symmetric_types={"Sibling"}) == {"Sibling": (1, 0, 0)}


def test_re_duplicate_predictions_do_not_change_counts(mini_gold):
    docs = []
    for doc in mini_gold.docs:
        sentences = []
        for s in doc.sentences:
            sentences.append(Sentence(s.tokens, s.entities, s.relations + s.relations))
        docs.append(Document(doc.doc_key, tuple(sentences)))
    doubled = Corpus(mini_gold.name, mini_gold.split, tuple(docs))
    for crit in ALL_CRITERIA:
        assert match_re(mini_gold, doubled, crit) == match_re(mini_gold, mini_gold, crit)


# --- score and configurations ------------------------------------------------

def test_score_identity_is_perfect(mini_gold):
    for average in ("micro", "macro"):
        report = score(mini_gold, mini_gold, ScoreConfig(average=average))
        assert report.ner.overall.f1 == 1.0
        assert report.re.overall.f1 == 1.0


def test_score_argtype_fixture_frozen_values(mini_gold, mini_pred_argtype):
    # hand enumeration: NER tp=5 fp=1 fn=1; strict RE tp=2 fp=1 fn=1
    report = score(mini_gold, mini_pred_argtype)
    assert report.ner.overall.tp == 5
    assert report.ner.overall.f1 == pytest.approx(5 / 6)
    assert report.re.overall.f1 == pytest.approx(2 / 3)
    boundaries = score(mini_gold, mini_pred_argtype, ScoreConfig(criterion=BOUNDARIES))
    assert boundaries.re.overall.f1 == 1.0
    assert report.re.overall.f1 < boundaries.re.overall.f1


def test_macro_differs_from_micro(mini_gold, mini_pred_argtype):
    micro = score(mini_gold, mini_pred_argtype, ScoreConfig(average="micro"))
    macro = score(mini_gold, mini_pred_argtype, ScoreConfig(average="macro"))
    # micro NER F1 = 5/6; macro = mean(Peop 1, Org 2/3, Loc 1) with
    # Org cell P=0/... hand: Org tp1? No: gold Org 2, pred Org 1 correct ->
    # Org: tp=1 fp=0 fn=1 -> P=1, R=.5, F1=2/3
    assert macro.ner.overall.f1 == pytest.approx((1.0 + 2 / 3 + 1.0) / 3)
    assert micro.ner.overall.f1 == pytest.approx(5 / 6)
    # counts stay sums in both modes
    assert macro.ner.overall.tp == micro.ner.overall.tp == 5


def test_excluding_perfect_type_lowers_macro():
    gold = one_sentence(TOKENS, [Mention("e0", 0, 1, "Other"), Mention("e1", 2, 3, "Peop")])
    pred = one_sentence(TOKENS, [Mention("e0", 0, 1, "Other"), Mention("e1", 4, 5, "Peop")])
    full = score(gold, pred, ScoreConfig(average="macro"))
    without = score(gold, pred, ScoreConfig(average="macro", excluded_entity_types={"Other"}))
    assert full.ner.overall.f1 == pytest.approx(0.5)
    assert without.ner.overall.f1 == 0.0
    assert without.ner.overall.f1 < full.ner.overall.f1


def test_exclusion_removes_exactly_that_types_counts(mini_gold, mini_pred_argtype):
    base = score(mini_gold, mini_pred_argtype)
    excluded = score(mini_gold, mini_pred_argtype, ScoreConfig(excluded_relation_types={"Live_In"}))
    cell = base.re.per_type["Live_In"]
    assert excluded.re.overall.tp == base.re.overall.tp - cell.tp
    assert excluded.re.overall.fp == base.re.overall.fp - cell.fp
    assert excluded.re.overall.fn == base.re.overall.fn - cell.fn
    assert "Live_In" not in excluded.re.per_type
    assert excluded.ner.per_type == base.ner.per_type


def test_excluded_entity_type_drops_its_relations(mini_gold, mini_pred_argtype):
    # excluding Org removes both gold relations with an Org argument; the
    # prediction keeps its Work_For (whose mistyped argument is Other, not
    # Org), which is now a false positive against an empty gold cell
    report = score(mini_gold, mini_pred_argtype, ScoreConfig(excluded_entity_types={"Org"}))
    assert set(report.re.per_type) == {"Live_In", "Work_For"}
    assert report.re.per_type["Live_In"] == report.re.per_type["Live_In"].from_counts(1, 0, 0)
    assert report.re.per_type["Work_For"].fp == 1
    assert report.re.spurious_types == ("Work_For",)
    assert report.re.overall.f1 == pytest.approx(2 / 3)


def test_unknown_excluded_type_warns(mini_gold):
    with pytest.warns(ConfigWarning, match="Vehicle"):
        score(mini_gold, mini_gold, ScoreConfig(excluded_entity_types={"Vehicle"}))


def test_prediction_only_types_listed_as_spurious(mini_gold, mini_pred_argtype):
    report = score(mini_gold, mini_pred_argtype, ScoreConfig(average="macro"))
    assert report.ner.spurious_types == ("Other",)
    # spurious type contributes no macro cell: mean over gold types only
    assert report.ner.overall.f1 == pytest.approx((1.0 + 2 / 3 + 1.0) / 3)


def test_empty_gold_after_exclusions_raises(mini_gold):
    stripped = Corpus(
        mini_gold.name,
        mini_gold.split,
        tuple(
            Document(d.doc_key, tuple(Sentence(s.tokens) for s in d.sentences)) for d in mini_gold.docs
        ),
    )
    with pytest.raises(NoScorableAnnotations):
        score(stripped, stripped)


def test_score_refuses_misaligned_unless_overridden(mini_gold):
    shorter = Corpus(mini_gold.name, mini_gold.split, mini_gold.docs[:1])
    with pytest.raises(AlignmentError):
        score(mini_gold, shorter)
    report = score(mini_gold, shorter, allow_misaligned=True)
    # annotations of the missing doc all count as misses
    assert report.re.overall.fn == 1


def test_all_settings_ordering_and_identity(mini_gold, mini_pred_argtype):
    reports = score_all_settings(mini_gold, mini_pred_argtype)
    assert set(reports) == {"strict", "boundaries", "relaxed", "last_token"}
    assert reports["strict"].re.overall.f1 <= reports["boundaries"].re.overall.f1
    perfect = score_all_settings(mini_gold, mini_gold)
    assert all(r.re.overall.f1 == 1.0 and r.ner.overall.f1 == 1.0 for r in perfect.values())
    assert reports["relaxed"].non_standard
    assert not reports["strict"].non_standard


def test_report_json_roundtrip(mini_gold, mini_pred_argtype):
    report = score(mini_gold, mini_pred_argtype, ScoreConfig(average="macro", symmetric_types={"Kill"}))
    payload = json.loads(json.dumps(report.to_dict()))
    assert EvalReport.from_dict(payload) == report


# --- invariants over random perturbed pairs ----------------------------------

def test_swap_symmetry_strict_and_boundaries():
    for seed in range(25):
        gold = random_corpus_with_relations(seed)
        pred = perturb(gold, random_profile(seed))
        for crit in (STRICT, BOUNDARIES):
            ab = score(gold, pred, ScoreConfig(criterion=crit))
            ba = score(pred, gold, ScoreConfig(criterion=crit))
            for task in ("ner", "re"):
                fwd = getattr(ab, task).overall
                rev = getattr(ba, task).overall
                assert fwd.precision == pytest.approx(rev.recall)
                assert fwd.recall == pytest.approx(rev.precision)
                assert fwd.f1 == pytest.approx(rev.f1)


def test_relaxed_ner_never_below_strict_ner():
    for seed in range(25):
        gold = random_corpus_with_relations(seed + 100)
        pred = perturb(gold, random_profile(seed + 100))
        strict = score(gold, pred, ScoreConfig(criterion=STRICT))
        relaxed = score(gold, pred, ScoreConfig(criterion=RELAXED))
        assert relaxed.ner.overall.f1 >= strict.ner.overall.f1 - 1e-12


def test_micro_f1_is_harmonic_mean():
    for seed in range(10):
        gold = random_corpus_with_relations(seed + 300)
        pred = perturb(gold, random_profile(seed + 300))
        report = score(gold, pred)
        for task in (report.ner, report.re):
            o = task.overall
            if o.precision > 0 and o.recall > 0:
                assert o.f1 == pytest.approx(2 * o.precision * o.recall / (o.precision + o.recall))
            tp = sum(c.tp for c in task.per_type.values())
            fp = sum(c.fp for c in task.per_type.values())
            fn = sum(c.fn for c in task.per_type.values())
            assert (o.tp, o.fp, o.fn) == (tp, fp, fn)
