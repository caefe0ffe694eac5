"""Command-line figure renderer.

    merit-plot <figure-kind> --in <csv> [--in <csv> ...] --out <img>

Output format follows the extension (.png or .svg). Exits nonzero with a
schema or I/O diagnostic on stderr when the input does not match the
simulator's CSV contract.
"""
from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .render import FIGURE_KINDS, PlotJob, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="merit-plot", description=__doc__)
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument(
        "--in", dest="inputs", action="append", required=True, help="input CSV (repeatable)"
    )
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--stat", default=None, help="stat column for heatmaps")
    parser.add_argument("--log-x", action="store_true")
    parser.add_argument("--no-annotate", dest="annotate", action="store_false")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(
            kind=args.kind,
            inputs=args.inputs,
            out_path=args.out,
            stat=args.stat,
            log_x=args.log_x,
            annotate=args.annotate,
        )
        result = render(job)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    print(f"{result.out_path} {result.digest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
