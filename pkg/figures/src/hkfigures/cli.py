"""Command line: hk-figures render --spec <figure-spec.json>"""

import argparse
import sys

from .csvio import EmptyInputError, NamedColumnError
from .render import render
from .spec import FigureSpec, FigureSpecError


def main(argv=None):
    parser = argparse.ArgumentParser(prog="hk-figures",
                                     description="render experiment CSVs to figures")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a spec file")
    p.add_argument("--spec", required=True, help="figure spec JSON")
    args = parser.parse_args(argv)

    try:
        spec = FigureSpec.load(args.spec)
        render(spec)
    except (FigureSpecError, NamedColumnError, EmptyInputError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    print(spec.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
