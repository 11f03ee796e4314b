"""Command line wrapper: one figure job per invocation."""

from __future__ import annotations

import argparse
import sys

from .io import FigureInputError
from .render import KINDS, FigureJob, Style, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blochfigs",
        description="Render a figure from blochdyn CLI outputs.",
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument(
        "--input",
        dest="inputs",
        action="append",
        required=True,
        metavar="FILE",
        help="input CSV/JSON (repeat for overlays; order is documented per kind)",
    )
    parser.add_argument("--output", required=True, help="output image (.svg or .png)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--size", nargs=2, type=float, default=(6.4, 4.8),
                        metavar=("W", "H"), help="figure size in inches")
    parser.add_argument("--dpi", type=int, default=150, help="raster resolution")
    parser.add_argument("--axes", nargs=2, default=("z", "x"), metavar=("A", "B"),
                        help="coordinate names for planar overlays")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    style = Style(
        width=args.size[0],
        height=args.size[1],
        dpi=args.dpi,
        title=args.title,
        axes=(args.axes[0], args.axes[1]),
    )
    job = FigureJob(kind=args.kind, inputs=tuple(args.inputs), output=args.output, style=style)
    try:
        render(job)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
