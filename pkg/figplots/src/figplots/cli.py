"""figplots command line: render figure CSVs to SVG + PNG."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .recipes import RECIPES
from .render import SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render floqff figure CSVs into SVG and PNG panels")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure (or all) from CSVs")
    p.add_argument("--fig", required=True,
                   help="figure id (see `figplots render --fig list`) or 'all'")
    p.add_argument("--in", dest="csv_dir", type=Path, required=True,
                   help="directory containing the figure CSVs")
    p.add_argument("--out", dest="out_dir", type=Path, required=True,
                   help="directory for the rendered images")
    args = parser.parse_args(argv)

    if args.fig == "list":
        print("\n".join(sorted(RECIPES)))
        return 0
    ids = sorted(RECIPES) if args.fig == "all" else [args.fig]
    unknown = [i for i in ids if i not in RECIPES]
    if unknown:
        print(f"figplots: unknown figure id {unknown[0]!r}; valid: "
              f"{', '.join(sorted(RECIPES))}", file=sys.stderr)
        return 2
    status = 0
    for figure_id in ids:
        try:
            report = render(figure_id, args.csv_dir, args.out_dir)
        except SchemaError as exc:
            print(f"figplots: schema error: {exc}", file=sys.stderr)
            status = 1
            continue
        print(f"wrote {report.svg_path} and {report.png_path} "
              f"({report.n_series} series)")
    return status


if __name__ == "__main__":
    sys.exit(main())
