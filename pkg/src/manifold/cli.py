"""Command line driver.

``manifold compose`` turns a JSON piece config into rendered variant
files; ``manifold matrix`` prints the probability matrix for a
standalone sections/grid/affinity input as JSON.

Exit codes: 0 success, 2 configuration errors, 3 infeasible schedule,
4 output I/O errors.  The DISCO_OUT environment variable overrides the
default output directory; --out overrides both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .compose import FORMATS, run_compose
from .config import load_config, parse_matrix_spec
from .errors import (
    ConfigError,
    ConfigParseError,
    DegenerateMatrix,
    ManifoldError,
    NoFeasibleDuration,
    SchedulingInfeasible,
    SchemaError,
)
from .matrix import build_matrix, cumulative_at

DEFAULT_OUT = "out"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manifold",
        description="Compose piece variants from a JSON configuration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compose = sub.add_parser("compose", help="render variants of a piece")
    compose.add_argument("--config", required=True, help="path to the piece config")
    compose.add_argument(
        "--seed", type=int, default=None, help="base seed (default: from config)"
    )
    compose.add_argument(
        "--variants", type=int, default=None,
        help="number of variants (default: from config, else 1)",
    )
    compose.add_argument(
        "--out", default=None,
        help="output directory (default: $DISCO_OUT or ./out)",
    )
    compose.add_argument(
        "--format", default="sco,txt",
        help=f"comma-separated formats from {{{','.join(FORMATS)}}}",
    )

    matrix = sub.add_parser("matrix", help="print a probability matrix as JSON")
    matrix.add_argument(
        "--input", required=True, help="path to a sections/grid/affinity JSON file"
    )
    return parser


def _parse_formats(arg: str) -> tuple[str, ...]:
    parts = tuple(s.strip() for s in arg.split(",") if s.strip())
    if not parts:
        raise SchemaError("--format: at least one format is required")
    for fmt in parts:
        if fmt not in FORMATS:
            raise SchemaError(
                f"--format: unknown format {fmt!r}; expected one of {list(FORMATS)}"
            )
    return parts


def _cmd_compose(args) -> int:
    config = load_config(args.config)
    formats = _parse_formats(args.format)
    out_dir = args.out or os.environ.get("DISCO_OUT") or DEFAULT_OUT
    if args.variants is not None and args.variants < 1:
        raise SchemaError("--variants: must be >= 1")
    written = run_compose(
        config,
        out_dir,
        seed=args.seed,
        variants=args.variants,
        formats=formats,
    )
    for path in written:
        print(path)
    return 0


def _cmd_matrix(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read {args.input}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{args.input} is not valid JSON: {exc}") from None
    sections, grid, affinity = parse_matrix_spec(data)
    matrix = build_matrix(sections, grid, affinity)
    m, n = matrix.shape
    payload = {
        "sections": [s.id for s in sections],
        "marks": list(grid.marks),
        "masses": [list(row) for row in matrix.masses],
        "cumulative": [
            [cumulative_at(matrix, i, j) for j in range(1, n + 1)]
            for i in range(1, m + 1)
        ],
    }
    print(json.dumps(payload, indent=2))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compose":
            return _cmd_compose(args)
        return _cmd_matrix(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchedulingInfeasible, NoFeasibleDuration, DegenerateMatrix) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ManifoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
