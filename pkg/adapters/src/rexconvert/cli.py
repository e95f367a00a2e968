"""Standalone converter command. Exit 0 on success, 2 on any input error."""

from __future__ import annotations

import argparse
import json
import sys

from .canonical import ConversionError
from .span_json import convert_span_json, export_span_json
from .tabular import convert_tabular


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rexconvert",
        description="Convert model-output dumps to the canonical annotation schema.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("span-json", help="per-sentence span records -> canonical file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--name", required=True, help="corpus name for the canonical file")
    p.add_argument("--split", default=None)

    p = sub.add_parser("tabular", help="token-per-line BILOU/BIO dump -> canonical file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--name", required=True)
    p.add_argument("--split", default=None)

    p = sub.add_parser("export-span-json", help="canonical file -> span records (interop)")
    p.add_argument("input")
    p.add_argument("output")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "span-json":
            count = convert_span_json(args.input, args.output, args.name, args.split)
            print(f"wrote {args.output} ({count} sentences)")
        elif args.command == "tabular":
            count, repairs = convert_tabular(args.input, args.output, args.name, args.split)
            print(f"wrote {args.output} ({count} sentences)")
            if repairs:
                print(f"warning: repaired {repairs} malformed tag transitions", file=sys.stderr)
        else:
            count = export_span_json(args.input, args.output)
            print(f"wrote {args.output} ({count} records)")
        return 0
    except (ConversionError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
