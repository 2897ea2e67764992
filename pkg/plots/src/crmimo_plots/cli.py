"""crmimo-plots: render sweep summaries to vector figures."""

import argparse
import sys

from .render import FigureSpec, RenderError, render


def _build_parser():
    parser = argparse.ArgumentParser(prog="crmimo-plots")
    sub = parser.add_subparsers(dest="command", required=True)
    rend = sub.add_parser("render", help="render one summary CSV to an SVG")
    rend.add_argument("--summary", required=True, help="summary.csv from `crmimo run`")
    rend.add_argument("--x", required=True, help="swept variable (e.g. K, M_b)")
    rend.add_argument("--out", required=True, help="output image path (.svg)")
    rend.add_argument("--x-label", default="", help="override the x-axis label")
    rend.add_argument("--title", default="", help="optional figure title")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spec = FigureSpec(
        summary_csv=args.summary,
        x_var=args.x,
        out_path=args.out,
        x_label=args.x_label,
        title=args.title,
    )
    try:
        info = render(spec)
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {info.out_path} ({', '.join(info.solvers)})")
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
