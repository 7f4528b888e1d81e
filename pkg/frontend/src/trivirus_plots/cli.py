"""Command line: render trajectory CSVs to figure files.

    trivirus-plot render --csv FILE --out FILE [--report FILE]
                         [--linear-time] [--title TEXT]

Exit codes: 0 success, 2 malformed input.
"""

from __future__ import annotations

import argparse
import sys

from .io import MalformedCsv, MalformedReport
from .render import PlotSpec, render_trajectories


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trivirus-plot",
        description="Render multi-virus SIS trajectory figures from CSV output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one trajectory CSV to a figure file")
    p.add_argument("--csv", required=True, help="trajectory CSV (simulator contract)")
    p.add_argument("--out", required=True, help="figure file (.pdf/.svg vector, .png raster)")
    p.add_argument("--report", default=None, help="simulation report JSON for target overlays")
    p.add_argument("--linear-time", action="store_true", help="linear instead of log time axis")
    p.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        csv_path=args.csv,
        output_path=args.out,
        title=args.title,
        log_time=not args.linear_time,
        report_path=args.report,
    )
    try:
        out = render_trajectories(spec)
    except (MalformedCsv, MalformedReport, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"figure written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
