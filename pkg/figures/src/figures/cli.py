"""`figures` command: render one figure from a sweep CSV."""

from __future__ import annotations

import argparse
import sys

from figures.core import KINDS, METRICS, FigureError, FigureSpec, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a score surface or heatmap from a sweep results CSV.",
    )
    parser.add_argument("--in", dest="input_csv", required=True, help="sweep results CSV")
    parser.add_argument("--model", required=True, help="model column value to plot (e.g. fk)")
    parser.add_argument("--metric", default="mean_score", choices=METRICS)
    parser.add_argument("--kind", default="surface", choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input_csv,
        model=args.model,
        metric=args.metric,
        kind=args.kind,
        output=args.out,
    )
    try:
        grid = render(spec)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1
    peak_p, peak_q = grid.peak_cell
    print(
        f"wrote {spec.output}: {spec.model} {spec.metric} "
        f"({len(grid.p_values)}x{len(grid.q_values)} grid, "
        f"peak at p={peak_p:g}, q={peak_q:g})"
    )
    return 0


def entry_point() -> None:  # console script hook
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
