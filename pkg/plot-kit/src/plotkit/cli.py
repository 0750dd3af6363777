"""Command-line wrapper: one figure per invocation."""

from __future__ import annotations

import argparse
import sys

from .csvio import NoDataError, SchemaError
from .figures import KINDS, FigureSpec, render

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_DATA = 3


def _int_list(text: str):
    try:
        values = tuple(int(p) for p in text.replace(" ", "").split(",") if p)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a comma-separated list of integers, got {text!r}"
        ) from None
    if not values:
        raise argparse.ArgumentTypeError("empty qubit-count list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnn-plots",
        description="Render figures from qnn-entropy result CSVs.",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="in_path", required=True,
                        help="input CSV produced by qnn-entropy")
    parser.add_argument("--out", dest="out_path", required=True,
                        help="output image; the extension picks the format, "
                             "SVG by default")
    parser.add_argument("--n", type=_int_list,
                        help="keep only these qubit counts, e.g. 8,12")
    parser.add_argument("--topology", help="topology label for title and legend")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(kind=args.kind, in_path=args.in_path,
                      out_path=args.out_path, n=args.n,
                      topology=args.topology)
    try:
        render(spec)
    except (FileNotFoundError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
