"""Command-line entry point.

    qnn-entropy <experiment> [--config FILE] --out FILE [overrides...]

Runs one experiment and writes its records as CSV. Exit status:
0 on success, 2 on configuration errors, 3 when the run completed
but a derived metric failed to converge (the flagged rows are still
written).
"""

import argparse
import sys

from .errors import ConfigError, QnnError
from .experiments import (
    BACKENDS,
    EXPERIMENT_KINDS,
    ExperimentConfig,
    emit_csv,
    has_unconverged,
    load_config,
    run,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNCONVERGED = 3


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnn-entropy",
        description="Simulate layered parameterized circuits and report "
        "entanglement-entropy statistics as CSV.",
    )
    parser.add_argument("experiment", choices=EXPERIMENT_KINDS)
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--n", type=_int_list, dest="n_values",
                        help="qubit counts, e.g. 8,12,16")
    parser.add_argument("--lmax", type=int, dest="l_max",
                        help="largest layer depth")
    parser.add_argument("--l-values", type=_int_list, dest="l_values",
                        help="explicit depth grid, e.g. 1,2,4,8")
    parser.add_argument("--samples", type=int, help="Monte Carlo draws per cell")
    parser.add_argument("--seed", type=int, help="base RNG seed")
    parser.add_argument("--feature", help="feature block: C1, C2, C3 or CZZ")
    parser.add_argument("--variational", help="variational block: C1, C2, C3 or CZZ")
    parser.add_argument("--topology", help="linear, circular or full")
    parser.add_argument("--mode", help="alternated or sequential")
    parser.add_argument("--chi-max", type=int, dest="chi_max",
                        help="bond-dimension cap")
    parser.add_argument("--epsilon", type=float, help="truncation threshold")
    parser.add_argument("--bins", type=int, help="fidelity histogram bins")
    parser.add_argument("--backend", choices=BACKENDS)
    return parser


_OVERRIDE_KEYS = (
    "n_values", "l_max", "l_values", "samples", "seed", "feature",
    "variational", "topology", "mode", "chi_max", "epsilon", "bins", "backend",
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        key: getattr(args, key)
        for key in _OVERRIDE_KEYS
        if getattr(args, key) is not None
    }
    overrides["experiment"] = args.experiment
    try:
        if args.config is not None:
            config = load_config(args.config, overrides)
        else:
            config = ExperimentConfig(**overrides)
            config.validate()
        records = run(config)
        emit_csv(records, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QnnError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if has_unconverged(records):
        print("warning: some derived metrics did not converge "
              "(rows flagged as nan)", file=sys.stderr)
        return EXIT_UNCONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
