"""Evaluation stack for end-to-end relation extraction.

One annotation schema, the standard matching criteria side by side,
dataset statistics with integrity checks against published counts,
comparability auditing for reported scores, and a seeded error simulator
for quantifying how much a looser criterion inflates results.
"""

from .audit import (
    ComparisonVerdict,
    FingerprintResult,
    GapReport,
    ResultClaim,
    compare_claims,
    fingerprint_setting,
    gap,
    gap_from_f1,
    load_claims,
    ner_re_average,
)
from .ingest import AlignmentReport, SchemaError, align, read_canonical, write_canonical
from .model import (
    Corpus,
    CorpusValidationError,
    Document,
    EntityKey,
    Mention,
    RelationKey,
    RelationMention,
    Sentence,
    Violation,
    entity_key_set,
    relation_key_set,
    validate_corpus,
)
from .perturb import PerturbationProfile, perturb, sweep
from .scoring import (
    ALL_CRITERIA,
    BOUNDARIES,
    LAST_TOKEN,
    RELAXED,
    STRICT,
    AlignmentError,
    Criterion,
    EvalReport,
    NoScorableAnnotations,
    PRF,
    ScoreConfig,
    TaskScores,
    match_ner,
    match_re,
    score,
    score_all_settings,
)
from .stats import (
    Discrepancy,
    MappingComplexity,
    ReferenceManifest,
    StatsReport,
    TruncationFinding,
    check_integrity,
    compute_stats,
    cooccurrence_matrix,
    detect_truncation,
    load_manifest,
    mapping_complexity,
)

__version__ = "0.1.0"
