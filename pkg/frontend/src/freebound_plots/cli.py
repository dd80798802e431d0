"""Script entry point: render boundary or path CSVs to an image file."""

from __future__ import annotations

import argparse
import sys

from .render import PlotJob, RenderError, plot_boundary, plot_paths


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="freebound-plots", description=__doc__)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--kind", choices=("boundary", "paths"), required=True)
    parser.add_argument("--labels", nargs="+", default=None)
    parser.add_argument("--reverse-time", action="store_true")
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 1
    job = PlotJob(
        inputs=tuple(args.inputs),
        output=args.out,
        labels=tuple(args.labels) if args.labels else None,
        reverse_time=args.reverse_time,
    )
    render = plot_boundary if args.kind == "boundary" else plot_paths
    try:
        out = render(job)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out, file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
