"""Command-line entry point: `figures --spec <json> --out <dir>`.

Exit codes: 0 success, 2 spec/input error.
"""

import argparse
import sys

from .render import render
from .spec import SpecError, load_spec


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render PNG figures from atlas-sensing CSV outputs.",
    )
    parser.add_argument("--spec", required=True, help="figure spec JSON")
    parser.add_argument("--out", default=".", help="output directory")
    args = parser.parse_args(argv)
    try:
        figures = load_spec(args.spec)
        for fig in figures:
            path = render(fig, args.out)
            print(path)
    except SpecError as exc:
        print(f"figure spec error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
