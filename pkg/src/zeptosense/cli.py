"""Command-line entry point: ``zeptosense <command> [options]``.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure,
4 acceptance-check failure in ``reproduce``.
"""
import argparse
import logging
import sys

from . import experiments
from .errors import (
    AncillaLeakageError,
    ConfigError,
    CrossCheckFailure,
    DerivativeStepError,
    DomainError,
    InvalidDimensionError,
    InvalidParameterError,
    NoEquilibriumError,
    NumericalFailure,
    StepSizeError,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CHECK = 0, 2, 3, 4

NUMERICAL = (NumericalFailure, NoEquilibriumError, CrossCheckFailure, DerivativeStepError,
             AncillaLeakageError, StepSizeError, DomainError, FloatingPointError)
CONFIG = (ConfigError, InvalidParameterError, InvalidDimensionError)


HELP = {
    "trap": "trap frequency and its slope over a sweep of the gap d",
    "scaling": "QFI and distance error versus photon number",
    "evolve": "lossless QFI, state fidelity and moments in time",
    "decohere": "QFI under photon loss for several loss rates",
    "cfi": "homodyne CFI per quadrature angle against the QFI",
}


def build_parser():
    ap = argparse.ArgumentParser(prog="zeptosense", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="INI configuration file")
        p.add_argument("--out", metavar="DIR", help="output directory for CSVs")
        p.add_argument("--threads", type=int, default=1, metavar="N")
        p.add_argument("--emit-plots", action="store_true", help="also write SVG line charts")
        p.add_argument("-v", "--verbose", action="store_true")

    for name in experiments.COMMANDS:
        common(sub.add_parser(name, help=HELP[name]))
    rp = sub.add_parser("reproduce", help="regenerate one figure from its pinned config")
    rp.add_argument("figure", help="one of " + ", ".join(experiments.FIGURES))
    common(rp)
    return ap


def _run(args):
    if args.threads < 1:
        raise ConfigError("--threads must be at least 1")
    if args.command == "reproduce":
        if args.config:
            raise ConfigError("reproduce uses the pinned config; --config is not accepted")
        out = args.out or f"reproduce_fig{args.figure}"
        paths, checks = experiments.reproduce(args.figure, out, args.threads, args.emit_plots)
        for p in paths:
            print(p)
        for c in checks:
            print(c.line())
        return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK
    config = experiments.load_config(args.config)
    _, paths = experiments.run(args.command, config, args.out, args.threads,
                               args.emit_plots or None)
    for p in paths:
        print(p)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    where = args.config or "<defaults>"
    try:
        return _run(args)
    except CONFIG as exc:
        print(f"config error ({where}): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL as exc:
        print(f"numerical failure ({where}): {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
