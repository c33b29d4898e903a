"""Command line front end: plotkit <figure-kind> <input.csv> -o <out>."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, PlotError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render figures from erlab result CSVs.",
    )
    parser.add_argument("kind", choices=FIGURE_KINDS, help="figure kind")
    parser.add_argument("input_csv", help="input results.csv")
    parser.add_argument("-o", "--output", required=True, help="output image path (.svg or .png)")
    parser.add_argument("--logx", action="store_true", help="log-scale x axis")
    parser.add_argument("--logy", action="store_true", help="log-scale y axis")
    args = parser.parse_args(argv)

    spec = FigureSpec(
        input_csv=args.input_csv,
        kind=args.kind,
        output=args.output,
        logx=args.logx,
        logy=args.logy,
    )
    try:
        render(spec)
    except PlotError as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 1
    return 0


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
