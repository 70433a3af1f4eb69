"""Command-line entry point for the experiment harness.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence.
"""

import argparse
import sys

from ..atlas import DivergenceError
from ..solvers import StepSizeError
from .config import ConfigError, ExperimentSpec
from .runner import run_experiment

# subcommand -> config kind
SUBCOMMANDS = {
    "recover": "single",
    "noise-sweep": "noise_sweep",
    "param-sweep": "param_sweep",
    "norm-sweep": "norm_sweep",
    "phase": "phase",
    "init-study": "init_study",
    "rip-probe": "rip_sweep",
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="atlas-sensing",
        description="Seeded matrix-sensing experiments with CSV/JSON output.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment configuration")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override base seed")
        p.add_argument("--threads", type=int, default=1, help="worker processes")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        expected_kind = SUBCOMMANDS[args.command]
        data = {}
        if args.config:
            import json

            try:
                with open(args.config) as fh:
                    data = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
            if not isinstance(data, dict):
                raise ConfigError("config root must be a JSON object")
            if "kind" in data and data["kind"] != expected_kind:
                raise ConfigError(
                    f"config kind {data['kind']!r} does not match subcommand "
                    f"{args.command!r} (expected {expected_kind!r})"
                )
        data["kind"] = expected_kind
        if args.seed is not None:
            data["base_seed"] = args.seed
        spec = ExperimentSpec.from_dict(data)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        run_experiment(spec, args.out, threads=args.threads, fmt=args.format)
    except (DivergenceError, StepSizeError) as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
