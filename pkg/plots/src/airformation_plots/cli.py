"""Command line for figure regeneration.

Exit codes: 0 on success, 2 on malformed or inconsistent inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import ConsistencyError, InputFormatError, PlotSpec, render

EXIT_OK = 0
EXIT_INPUT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airformation-plots",
        description="Regenerate trajectory figures from simulator output files",
    )
    parser.add_argument("--trajectory", required=True, help="trajectory CSV path")
    parser.add_argument("--metrics", required=True, help="metrics JSON path")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument(
        "--kind", required=True, choices=("plane", "abscissa"), help="figure kind"
    )
    parser.add_argument(
        "--tolerance", type=float, default=1.5e-2,
        help="final-position consistency tolerance (meters)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        trajectory_path=Path(args.trajectory),
        metrics_path=Path(args.metrics),
        output_path=Path(args.out),
        kind=args.kind,
        tolerance=args.tolerance,
    )
    try:
        result = render(spec)
    except (InputFormatError, ConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"wrote {result.output_path} ({result.n_agents} agents, "
          f"{result.samples_per_agent} samples each)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
