"""Command-line interface.

Exit codes are CI-friendly: 0 means clean, 1 means the tool ran fine but
found something (invariant violations, alignment mismatches, manifest
discrepancies, non-comparable claims, a fingerprint mismatch), 2 means the
invocation itself failed (usage, I/O, malformed input). Tables print
percentages with one decimal; ``--format json`` carries full precision.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import audit
from . import stats as stats_mod
from .ingest import SchemaError, align, parse_canonical, read_canonical, write_canonical
from .model import CorpusValidationError, validate_corpus
from .perturb import PerturbationProfile, perturb as run_perturb, sweep as run_sweep
from .scoring import (
    AlignmentError,
    EvalReport,
    NoScorableAnnotations,
    ScoreConfig,
    criterion,
    score,
    score_all_settings,
)

FOUND = 1
USAGE = 2


def _pct(x: float) -> str:
    return f"{100.0 * x:.1f}"


def _print_task_table(title: str, task, out) -> None:
    print(f"{title:<6} {'type':<16} {'P':>6} {'R':>6} {'F1':>6} {'TP':>6} {'FP':>6} {'FN':>6}", file=out)
    for name in sorted(task.per_type):
        prf = task.per_type[name]
        print(
            f"{'':<6} {name:<16} {_pct(prf.precision):>6} {_pct(prf.recall):>6} {_pct(prf.f1):>6}"
            f" {prf.tp:>6} {prf.fp:>6} {prf.fn:>6}",
            file=out,
        )
    o = task.overall
    print(
        f"{'':<6} {'ALL':<16} {_pct(o.precision):>6} {_pct(o.recall):>6} {_pct(o.f1):>6}"
        f" {o.tp:>6} {o.fp:>6} {o.fn:>6}",
        file=out,
    )
    if task.spurious_types:
        print(f"{'':<6} prediction-only types: {', '.join(task.spurious_types)}", file=out)


def _print_report_table(report: EvalReport, out) -> None:
    cfg = report.config
    line = f"criterion: {cfg.criterion.kind}   average: {cfg.average}"
    if cfg.criterion.diagnostic:
        line += "   [diagnostic setting: do not report as a result]"
    if report.non_standard:
        line += "   [non-standard relation matching]"
    print(line, file=out)
    if cfg.excluded_entity_types:
        print(f"excluded entity types: {', '.join(sorted(cfg.excluded_entity_types))}", file=out)
    if cfg.excluded_relation_types:
        print(f"excluded relation types: {', '.join(sorted(cfg.excluded_relation_types))}", file=out)
    _print_task_table("NER", report.ner, out)
    _print_task_table("RE", report.re, out)


def _alignment_findings(report, out) -> None:
    print(f"alignment failed ({len(report.mismatches)} mismatches):", file=out)
    for m in report.mismatches:
        where = m.doc_key if m.sent_index is None else f"{m.doc_key}/sent{m.sent_index}"
        print(f"  {m.reason:<16} {where}", file=out)


def _cmd_score(args) -> int:
    gold = read_canonical(args.gold)
    pred = read_canonical(args.pred)
    report = align(gold, pred)
    if not report.ok:
        _alignment_findings(report, sys.stdout)
        return FOUND
    config = ScoreConfig(
        criterion=criterion(args.criterion),
        average=args.average,
        excluded_entity_types=frozenset(args.exclude_entity_type),
        excluded_relation_types=frozenset(args.exclude_relation_type),
        symmetric_types=frozenset(args.symmetric_type),
    )
    if args.all_settings:
        reports = score_all_settings(gold, pred, config)
        if args.format == "json":
            print(json.dumps({kind: r.to_dict() for kind, r in reports.items()}, indent=2))
        else:
            for kind in ("strict", "boundaries", "relaxed", "last_token"):
                _print_report_table(reports[kind], sys.stdout)
                print()
    else:
        result = score(gold, pred, config)
        if args.format == "json":
            print(json.dumps(result.to_dict(), indent=2))
        else:
            _print_report_table(result, sys.stdout)
    return 0


def _histogram_tsv(title: str, hist: dict[int, int], out) -> None:
    print(f"# {title}", file=out)
    print("count\tsentences", file=out)
    for k in sorted(hist):
        print(f"{k}\t{hist[k]}", file=out)


def _resolve_manifest(ref: str) -> stats_mod.ReferenceManifest:
    path = Path(ref)
    if path.is_file():
        return stats_mod.load_manifest(path)
    try:
        return stats_mod.bundled_manifest(ref)
    except FileNotFoundError:
        raise FileNotFoundError(f"manifest {ref!r}: no such file and no bundled manifest by that name")


def _cmd_stats(args) -> int:
    corpus = read_canonical(args.corpus)
    report = stats_mod.compute_stats(corpus)
    manifest = _resolve_manifest(args.manifest) if args.manifest else None
    discrepancies = stats_mod.check_integrity(report, manifest) if manifest else []
    truncation = stats_mod.detect_truncation(report, manifest.all_relational if manifest else None)
    if args.format == "json":
        payload = report.to_dict()
        payload["truncation"] = truncation._asdict()
        if manifest:
            payload["discrepancies"] = [d._asdict() for d in discrepancies]
        print(json.dumps(payload, indent=2))
    elif args.format == "tsv":
        _histogram_tsv("entity mentions per sentence", report.entities_per_sentence, sys.stdout)
        print()
        _histogram_tsv("relation mentions per sentence", report.relations_per_sentence, sys.stdout)
    else:
        split = report.split or "(none)"
        print(f"corpus: {report.name}   split: {split}")
        for fname in ("documents", "sentences", "tokens", "entities", "relations"):
            print(f"  {fname:<32} {getattr(report, fname):>8}")
        print(f"  {'zero-relation sentence fraction':<32} {report.zero_relation_fraction:>8.3f}")
        print(f"  {'overlapping mention pairs':<32} {report.overlapping_mentions:>8}")
        print(f"  {'nested mention pairs':<32} {report.nested_mentions:>8}")
        print("entity types:")
        for t, c in sorted(report.entity_types.items()):
            print(f"  {t:<20} {c:>6}")
        print("relation types:")
        for t, c in sorted(report.relation_types.items()):
            print(f"  {t:<20} {c:>6}")
        complexity = stats_mod.mapping_complexity(report.cooccurrence)
        print(f"relation/argument-type mapping bijective: {complexity.bijective}")
        print(f"truncation: {truncation.note}")
        if manifest:
            if discrepancies:
                print(f"integrity check against {manifest.name!r}: {len(discrepancies)} discrepancies")
                for d in discrepancies:
                    print(f"  {d.field:<12} expected {d.expected:>8}  actual {d.actual:>8}  delta {d.delta:+d}")
            else:
                print(f"integrity check against {manifest.name!r}: ok")
    return FOUND if (discrepancies or truncation.suspicious) else 0


def _cmd_check(args) -> int:
    with open(args.corpus, encoding="utf-8") as fh:
        corpus = parse_canonical(json.load(fh))
    violations = validate_corpus(corpus)
    if args.format == "json":
        print(json.dumps([dataclasses.asdict(v) for v in violations], indent=2))
    else:
        if violations:
            for v in violations:
                print(str(v))
        print(f"{len(violations)} violations")
    return FOUND if violations else 0


def _cmd_compare(args) -> int:
    claims = audit.load_claims(audit.bundled_claims_path() if args.bundled else args.claims)
    rows = audit.compare_all(claims)
    incomparable = [row for row in rows if not row.verdict.comparable]
    if args.format == "json":
        payload = [
            {
                "a": a.label,
                "b": b.label,
                "comparable": verdict.comparable,
                "reasons": list(verdict.reasons),
            }
            for a, b, verdict in rows
        ]
        print(json.dumps(payload, indent=2))
    else:
        if not rows:
            print("fewer than two claims: nothing to compare")
        for a, b, verdict in rows:
            flag = "ok " if verdict.comparable else "NOT"
            print(f"{flag} {a.label:<14} vs {b.label:<14}", end="")
            print(f"  [{'; '.join(verdict.reasons)}]" if verdict.reasons else "")
        print(f"{len(incomparable)} of {len(rows)} pairs not comparable")
    return FOUND if incomparable else 0


def _profile_from_args(args) -> PerturbationProfile:
    if args.profile:
        with open(args.profile, encoding="utf-8") as fh:
            profile = PerturbationProfile.from_dict(json.load(fh))
    else:
        profile = PerturbationProfile()
    overrides = {}
    for name in (
        "p_ent_type_swap",
        "p_ent_boundary_shift",
        "p_ent_drop",
        "p_ent_spurious",
        "p_rel_type_swap",
        "p_rel_drop",
        "p_rel_spurious",
        "max_spurious_len",
    ):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.seed is not None:
        overrides["seed"] = args.seed
    return dataclasses.replace(profile, **overrides) if overrides else profile


def _cmd_perturb(args) -> int:
    gold = read_canonical(args.gold)
    profile = _profile_from_args(args)
    pred = run_perturb(gold, profile)
    write_canonical(pred, args.out)
    print(f"wrote {args.out}")
    return 0


def _gap_row(profile: PerturbationProfile, report, error) -> str:
    knobs = " ".join(
        f"{name.replace('p_', '')}={getattr(profile, name):.2f}"
        for name in (
            "p_ent_type_swap",
            "p_ent_boundary_shift",
            "p_ent_drop",
            "p_ent_spurious",
            "p_rel_type_swap",
            "p_rel_drop",
            "p_rel_spurious",
        )
        if getattr(profile, name) > 0
    )
    head = f"seed={profile.seed:<10} {knobs or '(identity)'}"
    if error:
        return f"{head}  ERROR: {error}"
    return (
        f"{head}  strict={_pct(report.strict_f1)} boundaries={_pct(report.boundaries_f1)}"
        f" gap={_pct(report.absolute_gap)} rel_overest={_pct(report.relative_overestimation)}%"
    )


def _cmd_sweep(args) -> int:
    gold = read_canonical(args.gold)
    with open(args.grid, encoding="utf-8") as fh:
        grid_data = json.load(fh)
    if not isinstance(grid_data, list):
        raise ValueError("grid file must contain a JSON array of profile objects")
    profiles = [PerturbationProfile.from_dict(p) for p in grid_data]
    if args.seed is not None:
        profiles = [dataclasses.replace(p, seed=args.seed) for p in profiles]
    rows = run_sweep(gold, profiles)
    if args.format == "json":
        payload = [
            {
                "profile": row.profile.to_dict(),
                "gap": row.gap.to_dict() if row.gap else None,
                "error": row.error,
            }
            for row in rows
        ]
        print(json.dumps(payload, indent=2))
    else:
        for row in rows:
            print(_gap_row(row.profile, row.gap, row.error))
    return FOUND if any(row.error for row in rows) else 0


def _cmd_fingerprint(args) -> int:
    gold = read_canonical(args.gold)
    pred = read_canonical(args.pred)
    claim = audit.ResultClaim(
        label="reported",
        task=args.task,
        value=args.value,
        dataset=gold.name,
        claimed_setting=args.setting,
        claimed_average=args.average,
    )
    result = audit.fingerprint_setting(gold, pred, claim, tolerance=args.tolerance)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "scores": result.scores,
                    "matches": list(result.matches),
                    "verdict": result.verdict,
                    "mismatch_with_claim": result.mismatch_with_claim,
                },
                indent=2,
            )
        )
    else:
        print(f"reported {args.task.upper()} F1: {_pct(claim.value)}  (tolerance {args.tolerance})")
        for kind, value in result.scores.items():
            mark = "*" if kind in result.matches else " "
            print(f"  {mark} {kind:<12} {_pct(value)}")
        print(f"verdict: {result.verdict}")
    return FOUND if result.mismatch_with_claim or result.verdict == "no_match" else 0


def _add_common(parser: argparse.ArgumentParser, formats=("table", "json")) -> None:
    parser.add_argument("--format", choices=formats, default="table", help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rexeval",
        description="Score, audit and stress-test end-to-end relation extraction evaluations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a prediction file against gold")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("--criterion", default="strict", help="strict | boundaries | relaxed | last-token")
    p.add_argument("--average", choices=("micro", "macro"), default="micro")
    p.add_argument("--exclude-entity-type", action="append", default=[], metavar="TYPE")
    p.add_argument("--exclude-relation-type", action="append", default=[], metavar="TYPE")
    p.add_argument("--symmetric-type", action="append", default=[], metavar="TYPE")
    p.add_argument("--all-settings", action="store_true", help="emit reports for all four criteria")
    _add_common(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("stats", help="dataset statistics, optionally checked against a manifest")
    p.add_argument("corpus")
    p.add_argument("--manifest", help="manifest file path, or a bundled name (conll04, ace05)")
    _add_common(p, formats=("table", "json", "tsv"))
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("check", help="validate a canonical file, reporting violations")
    p.add_argument("corpus")
    _add_common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("compare", help="pairwise comparability verdicts over a claims file")
    p.add_argument("claims", nargs="?", help="claims JSON file")
    p.add_argument("--bundled", action="store_true", help="use the packaged demonstration claims")
    _add_common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("perturb", help="derive a synthetic prediction file from gold")
    p.add_argument("gold")
    p.add_argument("--out", required=True)
    p.add_argument("--profile", help="profile JSON file (flags below override it)")
    p.add_argument("--seed", type=int, default=None)
    for name in (
        "p-ent-type-swap",
        "p-ent-boundary-shift",
        "p-ent-drop",
        "p-ent-spurious",
        "p-rel-type-swap",
        "p-rel-drop",
        "p-rel-spurious",
    ):
        p.add_argument(f"--{name}", type=float, default=None, metavar="P")
    p.add_argument("--max-spurious-len", type=int, default=None, metavar="N")
    p.set_defaults(func=_cmd_perturb)

    p = sub.add_parser("sweep", help="gap table over a grid of perturbation profiles")
    p.add_argument("gold")
    p.add_argument("grid", help="JSON array of profile objects")
    p.add_argument("--seed", type=int, default=None, help="override every profile's seed")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fingerprint", help="which criteria could have produced a reported F1")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("--task", choices=("ner", "re"), required=True)
    p.add_argument("--value", type=float, required=True, help="reported F1 (0-1 or percentage)")
    p.add_argument("--setting", default="unknown", help="the setting the report claims")
    p.add_argument("--average", choices=("micro", "macro", "unknown"), default="unknown")
    p.add_argument(
        "--tolerance", type=float, default=audit.DEFAULT_FINGERPRINT_TOLERANCE, metavar="EPS"
    )
    _add_common(p)
    p.set_defaults(func=_cmd_fingerprint)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "compare" and not args.bundled and not args.claims:
        parser.error("compare needs a claims file or --bundled")
    try:
        return args.func(args)
    except AlignmentError as exc:
        _alignment_findings(exc.report, sys.stdout)
        return FOUND
    except (
        SchemaError,
        CorpusValidationError,
        NoScorableAnnotations,
        json.JSONDecodeError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
