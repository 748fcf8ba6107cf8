import argparse
import sys
import warnings
from typing import List, Optional

import pydantic
import yaml

from tubalfgd.configuration import Configuration, ModuleFactory
from tubalfgd.errors import InvalidParameter, NumericalError, TensorFileError, ValidationError
from tubalfgd.experiments.runner import resolve_threads
from tubalfgd.utils import log

warnings.simplefilter(action="ignore", category=FutureWarning)  # disable pandas warning output

EXIT_OK = 0
EXIT_IO_ERROR = 1
EXIT_VALIDATION_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS keeps unset flags out of the namespace so they may appear on
    # either side of the subcommand.
    parser = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    parser.add_argument(
        "--config", default=argparse.SUPPRESS, help="YAML file overriding the defaults."
    )
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Base seed (u64).")
    parser.add_argument("--out", default=argparse.SUPPRESS, help="Root output directory.")
    parser.add_argument(
        "--threads",
        type=int,
        default=argparse.SUPPRESS,
        help="Worker processes for independent runs, 0 for in-process.",
    )
    parser.add_argument(
        "--measurement",
        choices=["gaussian", "symmetrized"],
        default=argparse.SUPPRESS,
        help="Measurement mode.",
    )
    parser.add_argument(
        "--materialization",
        choices=["streamed", "dense", "auto"],
        default=argparse.SUPPRESS,
        help="Keep measurement tensors in memory or regenerate them per use.",
    )
    parser.add_argument(
        "--repeats", type=int, default=argparse.SUPPRESS, help="Number of seeded runs."
    )
    parser.add_argument(
        "--dev", action="store_true", default=argparse.SUPPRESS, help="Show debug output."
    )
    return parser


def _cell(value: str):
    n, v = value.split(",")
    return [int(n), float(v)]


def _shape(value: str):
    n, r, n3 = value.split(",")
    return [int(n), int(r), int(n3)]


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(
        prog="tubalfgd",
        description="Low-tubal-rank tensor recovery by factorized gradient descent.",
        parents=[common],
        allow_abbrev=False,
    )
    subparsers = parser.add_subparsers(dest="subcommand", title="subcommands")

    def add(command: str, help_text: str) -> argparse.ArgumentParser:
        return subparsers.add_parser(
            command, help=help_text, parents=[common], allow_abbrev=False
        )

    ## Arguments of convergence
    conv = add("convergence", "Solver traces in the exact-rank and over-rank scenarios.")
    conv.add_argument("--n", type=int)
    conv.add_argument("--n3", type=int)
    conv.add_argument("--r-star", dest="r_star", type=int)
    conv.add_argument("--m", type=int, help="Measurement count; derived from --m-formula if unset.")
    conv.add_argument("--m-formula", dest="m_formula", choices=["dof", "rank_scaled"])
    conv.add_argument("--v", type=float, help="Noise standard deviation.")
    conv.add_argument("--eta", type=float)
    conv.add_argument("--eta-mode", dest="eta_mode", choices=["fixed", "auto"])
    conv.add_argument("--max-iters", dest="max_iters", type=int)
    conv.add_argument("--stop", choices=["rel_change", "rel_error", "iters_only"])
    conv.add_argument("--tol", type=float)
    conv.add_argument("--scenarios", nargs="+", choices=["exact", "over"])
    conv.add_argument("--trace-every", dest="trace_every", type=int)
    conv.add_argument(
        "--record-error-terms", dest="record_error_terms", action="store_true", default=None
    )
    conv.add_argument("--save-tensors", dest="save_tensors", action="store_true", default=None)

    ## Arguments of phase
    phase = add("phase", "Recovery phase transition over measurement count and true rank.")
    phase.add_argument("--n", type=int)
    phase.add_argument("--n3", type=int)
    phase.add_argument("--m-points", dest="m_points", type=int)
    phase.add_argument("--r-points", dest="r_points", type=int)
    phase.add_argument("--m-values", dest="m_values", type=int, nargs="+")
    phase.add_argument("--r-values", dest="r_values", type=int, nargs="+")
    phase.add_argument("--max-iters", dest="max_iters", type=int)
    phase.add_argument("--success-tol", dest="success_tol", type=float)
    phase.add_argument("--min-successes", dest="min_successes", type=int)

    ## Arguments of tables
    tables = add("tables", "Noisy over-rank recovery per (n, v) cell of a rank family.")
    tables.add_argument("--family", choices=["r30", "r20", "r10"])
    tables.add_argument(
        "--cells", type=_cell, nargs="+", help="Cells as n,v pairs, e.g. 30,0.3 50,0.5."
    )
    tables.add_argument("--n3", type=int)
    tables.add_argument("--max-iters", dest="max_iters", type=int)
    tables.add_argument("--tol", type=float)

    ## Arguments of lemma-check
    lemma = add("lemma-check", "Population and sample dynamics of the subspace error terms.")
    lemma.add_argument("--n", type=int)
    lemma.add_argument("--n3", type=int)
    lemma.add_argument("--r-star", dest="r_star", type=int)
    lemma.add_argument("--scenarios", nargs="+", choices=["exact", "over"])
    lemma.add_argument("--eta", type=float)
    lemma.add_argument("--max-iters", dest="max_iters", type=int)

    ## Arguments of bench
    bench = add("bench", "Per-iteration kernel timing and its scaling exponent in n.")
    bench.add_argument(
        "--shapes", type=_shape, nargs="*", help="Shapes as n,r,n3 triples, e.g. 64,8,5."
    )
    bench.add_argument("--warmup", type=int)
    bench.add_argument(
        "--timing-repeats",
        dest="timing_repeats",
        type=int,
        help="Timed calls per shape; bench rejects --repeats.",
    )

    ## Arguments of rip
    rip = add("rip", "Monte-Carlo estimate of the restricted isometry constant.")
    rip.add_argument("--n", type=int)
    rip.add_argument("--n3", type=int)
    rip.add_argument("--r", type=int)
    rip.add_argument("--m", type=int)
    rip.add_argument("--trials", type=int)

    return parser


RUNTIME_FLAGS = ["seed", "out", "measurement", "materialization"]
GLOBAL_FLAGS = RUNTIME_FLAGS + ["config", "threads", "repeats", "dev", "subcommand"]


def configure(args: argparse.Namespace) -> Configuration:
    """
    Resolve the configuration of one command.

    Precedence is command-line flags, then ``TUBAL_FGD_THREADS`` for the
    worker count, then the ``--config`` file, then the packaged defaults.
    """
    config = Configuration()
    if getattr(args, "config", None):
        config.update_from_yaml(args.config)
    config.set_runtime(**{flag: getattr(args, flag, None) for flag in RUNTIME_FLAGS})
    config.set_runtime(
        threads=resolve_threads(getattr(args, "threads", None), config.runtime.get("threads", 0))
    )
    command_flags = {k: v for k, v in vars(args).items() if k not in GLOBAL_FLAGS}
    repeats = getattr(args, "repeats", None)
    if args.subcommand == "bench":
        if repeats is not None:
            raise InvalidParameter("bench takes --timing-repeats, not --repeats")
        repeats = command_flags.pop("timing_repeats", None)
    command_flags["repeats"] = repeats
    config.set_experiment_config(args.subcommand, command_flags)
    return config


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for the tubalfgd CLI.

    Parses the command line, resolves the configuration and runs the
    experiment of the chosen subcommand.

    Returns:
        The process exit code: 0 on success, 1 on I/O errors, 2 on invalid
        input and 3 on numerical failure.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_help()
        return EXIT_VALIDATION_ERROR
    log.set_dev_mode(bool(getattr(args, "dev", False)))

    try:
        config = configure(args)
        experiment = ModuleFactory(config).create_experiment(args.subcommand)
        log.info(f"running {args.subcommand} with {experiment.config!r}")
        record = experiment.run()
    except NumericalError as e:
        log.error(f"{type(e).__name__}: {e}")
        log.critical(f"{args.subcommand} failed numerically: {e}")
        return EXIT_NUMERICAL_ERROR
    except (ValidationError, pydantic.ValidationError, yaml.YAMLError) as e:
        log.critical(f"invalid input for {args.subcommand}: {e}")
        return EXIT_VALIDATION_ERROR
    except (TensorFileError, OSError) as e:
        log.critical(f"{args.subcommand} could not read or write a file: {e}")
        return EXIT_IO_ERROR

    log.color_print(
        f"{args.subcommand}: {len(record.rows)} runs written to {experiment.output_dir}"
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
