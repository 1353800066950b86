import sys
from argparse import ArgumentParser, Namespace
from typing import Sequence

from .config import RunConfig
from .enums import Ensemble, Metric, Proposal, SequenceKind
from .engine import Payload, to_json
from .estimator import DEFAULT_GROUP_SAMPLES, DEFAULT_PROB_GROUP_SAMPLES
from .exceptions import ConfigurationError, NumericalError
from .factory import create_engine, create_validator

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_NUMERICAL = 3


def curve(config: RunConfig) -> int:
    result = create_engine(config).curve()
    if not config.out:
        sys.stdout.write(result.to_csv_string())
    return EXIT_OK


def prob(config: RunConfig) -> int:
    return emit(config, create_engine(config).probability())


def curveprob(config: RunConfig) -> int:
    return emit(config, create_engine(config).curve_probability())


def absep(config: RunConfig) -> int:
    return emit(config, create_engine(config).absolute_probability())


def jumps(config: RunConfig) -> int:
    return emit(config, create_engine(config).jumps())


def fit(config: RunConfig) -> int:
    return emit(config, create_engine(config).fit())


def cross(config: RunConfig) -> int:
    return emit(config, create_engine(config).crossings())


def dispersion(config: RunConfig) -> int:
    return emit(config, create_engine(config).dispersion())


def plot(config: RunConfig) -> int:
    create_engine(config).plot()
    return EXIT_OK


def validate(config: RunConfig) -> int:
    results = create_validator(config).run()
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION_FAILED


def emit(config: RunConfig, payload: Payload) -> int:
    content = to_json(payload) + "\n"
    if config.out:
        with open(config.out, "w", newline="\n") as f:
            f.write(content)
    else:
        sys.stdout.write(content)
    return EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))


def run(argv: Sequence[str]) -> int:
    """Parses the arguments, runs the command and maps failures to exit codes.

    Args:
        argv (Sequence[str]): The arguments, without the program name.

    Returns:
        int: 0 on success, 1 on failed validation, 2 on configuration errors, 3 on numerical errors.
    """
    try:
        namespace = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIGURATION

    try:
        config = build_config(namespace).with_env()
        return namespace.func(config)
    except ConfigurationError as exc:
        print(f"sepscan: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIGURATION
    except NumericalError as exc:
        print(f"sepscan: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"sepscan: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIGURATION


def build_config(namespace: Namespace) -> RunConfig:
    values = {k: v for k, v in vars(namespace).items() if k != "func" and v is not None}
    for key in ("interval", "window", "offsets", "excluded", "labels"):
        if key in values:
            values[key] = tuple(values[key])
    return RunConfig(**values)


def parse_args(args: Sequence[str]) -> Namespace:

    common = ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--sequence", type=SequenceKind.from_str, default=SequenceKind.SOBOL)
    common.add_argument("--out")
    common.add_argument("--quiet", action="store_true")

    ensemble = ArgumentParser(add_help=False)
    ensemble.add_argument("--ensemble", type=Ensemble.from_str, default=Ensemble.COMPLEX)

    measure = ArgumentParser(add_help=False)
    measure.add_argument("--metric", type=Metric.from_str, default=Metric.HS)
    measure.add_argument("--n-lambda", dest="n_lambda", type=int)
    measure.add_argument("--proposal", type=Proposal.from_str)

    curve_in = ArgumentParser(add_help=False)
    curve_in.add_argument("--in", dest="input", required=True)

    parser = ArgumentParser(prog="sepscan")
    subparsers = parser.add_subparsers(dest="command", required=True)

    curve_parser = subparsers.add_parser("curve", parents=[common, ensemble])
    curve_parser.add_argument("--bins", type=int)
    curve_parser.add_argument("--spectra-per-bin", dest="spectra_per_bin", type=int)
    curve_parser.add_argument(
        "--group-samples", dest="group_samples", type=int, default=DEFAULT_GROUP_SAMPLES
    )
    curve_parser.add_argument("--max-rejects", dest="max_rejects", type=int)
    curve_parser.set_defaults(func=curve)

    prob_parser = subparsers.add_parser("prob", parents=[common, ensemble, measure])
    prob_parser.add_argument(
        "--group-samples", dest="group_samples", type=int, default=DEFAULT_PROB_GROUP_SAMPLES
    )
    prob_parser.set_defaults(func=prob)

    curveprob_parser = subparsers.add_parser("curveprob", parents=[common, ensemble, measure, curve_in])
    curveprob_parser.set_defaults(func=curveprob)

    absep_parser = subparsers.add_parser("absep", parents=[common, ensemble, measure])
    absep_parser.set_defaults(func=absep)

    jumps_parser = subparsers.add_parser("jumps", parents=[common, curve_in])
    jumps_parser.add_argument("--z-threshold", dest="z_threshold", type=float)
    jumps_parser.add_argument("--standardised", action="store_true")
    jumps_parser.set_defaults(func=jumps)

    fit_parser = subparsers.add_parser("fit", parents=[common, curve_in])
    fit_parser.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"), required=True)
    fit_parser.add_argument("--exclude", dest="excluded", nargs="*", type=float, default=[])
    fit_parser.add_argument("--plot", dest="plot_out", metavar="SVG")
    fit_parser.set_defaults(func=fit)

    cross_parser = subparsers.add_parser("cross", parents=[common, curve_in])
    cross_parser.add_argument("--overlay", required=True)
    cross_parser.add_argument("--smooth", type=int)
    cross_parser.set_defaults(func=cross)

    dispersion_parser = subparsers.add_parser("dispersion", parents=[common, ensemble])
    dispersion_parser.add_argument("--c", type=float, required=True)
    dispersion_parser.add_argument("--spectra-per-bin", dest="spectra_per_bin", type=int, default=30)
    dispersion_parser.add_argument("--group-samples", dest="group_samples", type=int, default=100)
    dispersion_parser.add_argument("--max-rejects", dest="max_rejects", type=int)
    dispersion_parser.set_defaults(func=dispersion)

    plot_parser = subparsers.add_parser("plot", parents=[common, curve_in])
    plot_parser.add_argument("--overlay")
    plot_parser.add_argument("--derivative", action="store_true")
    plot_parser.add_argument("--offsets", nargs=2, type=float, metavar=("BASE", "OVERLAY"))
    plot_parser.add_argument("--window", nargs=2, type=float, metavar=("A", "B"))
    plot_parser.add_argument("--overlay-scale", dest="overlay_scale", type=float)
    plot_parser.add_argument("--labels", nargs="+", metavar="LABEL")
    plot_parser.set_defaults(func=plot)

    validate_parser = subparsers.add_parser("validate", parents=[common])
    validate_parser.set_defaults(func=validate)

    return parser.parse_args(args)
