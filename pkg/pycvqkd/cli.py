"""
pycvqkd command line

    pycvqkd attack --kind optimal --eta 0.5 --delta 0.1 --va 10 --json
    pycvqkd thresholds --va 1e6 --delta-min 0 --delta-max 0.6 --steps 61 --out fig.csv
    pycvqkd montecarlo --kind bma --eta 0.5 --delta 0.1 --va 10 --samples 1000000 --seed 42
    pycvqkd plot --in fig.csv --out fig.svg

Exit codes: 0 success, 1 usage, 2 domain violation,
3 I/O failure, 4 malformed input data.
"""

import argparse
import json
import logging
import sys

import yaml

from . import __version__
from .attacks import AttackKind, attack_report, threshold_curve
from .circuit import ChannelParams
from .config import Scenario, SweepSpec
from .errors import DomainError, MalformedDataError
from .io.plotting.threshold_plot import render_threshold_svg
from .io.threshold_file import (format_threshold_csv, read_threshold_csv,
                                write_threshold_csv)
from .montecarlo import SimConfig, run_simulation

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_MALFORMED = 4

LOG_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"


class ArgumentParser(argparse.ArgumentParser):
    """
    argparse exits with 2 on usage errors; here 2 means
    a domain violation, so usage errors exit with 1
    """

    def error(self, message):

        self.print_usage(sys.stderr)

        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(parser):

    parser.add_argument("--config", help="scenario yaml file; flags take precedence")
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level on standard error",
    )


def _add_channel(parser):

    parser.add_argument("--eta", type=float, help="line transmission")
    parser.add_argument("--delta", type=float, help="excess noise (shot-noise units)")
    parser.add_argument("--va", type=float, help="modulation variance")
    parser.add_argument("--kind", choices=[k.value for k in AttackKind], help="attack")
    parser.add_argument("--json", action="store_true", help="single-line JSON output")


def build_parser():

    parser = ArgumentParser(
        prog="pycvqkd",
        description="Security of coherent-state CV-QKD against Gaussian individual attacks",
    )

    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    sub = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    sub.required = True

    attack = sub.add_parser("attack", help="evaluate one attack on one channel")
    _add_common(attack)
    _add_channel(attack)

    thresholds = sub.add_parser("thresholds", help="sweep the thresholds to CSV")
    _add_common(thresholds)
    thresholds.add_argument("--va", type=float, help="modulation variance")
    thresholds.add_argument("--delta-min", type=float)
    thresholds.add_argument("--delta-max", type=float)
    thresholds.add_argument("--steps", type=int)
    thresholds.add_argument("--out", help="CSV path (standard output if omitted)")
    thresholds.add_argument("--workers", type=int)

    montecarlo = sub.add_parser("montecarlo", help="sample protocol rounds")
    _add_common(montecarlo)
    _add_channel(montecarlo)
    montecarlo.add_argument("--samples", type=int)
    montecarlo.add_argument("--seed", type=int)
    montecarlo.add_argument("--workers", type=int)
    montecarlo.add_argument("--save", help="also store the report in an HDF5 file")

    plot = sub.add_parser("plot", help="render a threshold CSV as SVG")
    _add_common(plot)
    plot.add_argument("--in", dest="in_file", required=True, help="threshold CSV")
    plot.add_argument("--out", required=True, help="SVG path")

    return parser


def _pick(flag, fallback):

    return fallback if flag is None else flag


def _scenario(args, parser):

    if args.config is None:

        return Scenario()

    return Scenario.from_yaml(args.config)


def _channel(args, scenario, parser):

    base = scenario.channel

    eta = _pick(args.eta, base.eta if base is not None else None)
    delta = _pick(args.delta, base.delta if base is not None else None)
    v_a = _pick(args.va, base.v_a if base is not None else None)

    missing = [
        flag for flag, value in (("--eta", eta), ("--delta", delta), ("--va", v_a)) if value is None
    ]

    if missing:

        parser.error(f"missing {', '.join(missing)}")

    return ChannelParams(eta, delta, v_a)


def _kind(args, scenario):

    if args.kind is not None:

        return AttackKind(args.kind)

    return scenario.kind


def _dumps(obj):

    return json.dumps(obj, sort_keys=True)


def cmd_attack(args, parser):

    scenario = _scenario(args, parser)

    report = attack_report(_kind(args, scenario), _channel(args, scenario, parser))

    if args.json:

        print(_dumps(report.as_dict()))

    else:

        print(report.table.to_string())


def cmd_thresholds(args, parser):

    scenario = _scenario(args, parser)

    base = scenario.sweep

    v_a = _pick(args.va, base.v_a if base is not None else None)
    delta_min = _pick(args.delta_min, base.delta_min if base is not None else None)
    delta_max = _pick(args.delta_max, base.delta_max if base is not None else None)
    steps = _pick(args.steps, base.steps if base is not None else None)
    out = _pick(args.out, base.out if base is not None else None)

    if v_a is None and scenario.channel is not None:

        v_a = scenario.channel.v_a

    missing = [
        flag
        for flag, value in (
            ("--va", v_a),
            ("--delta-min", delta_min),
            ("--delta-max", delta_max),
            ("--steps", steps),
        )
        if value is None
    ]

    if missing:

        parser.error(f"missing {', '.join(missing)}")

    sweep = SweepSpec(v_a, delta_min, delta_max, steps, out)

    curve = threshold_curve(
        sweep.v_a, sweep.delta_grid, workers=_pick(args.workers, scenario.workers)
    )

    if sweep.out is None:

        sys.stdout.write(format_threshold_csv(curve))

    else:

        write_threshold_csv(curve, sweep.out)


def cmd_montecarlo(args, parser):

    scenario = _scenario(args, parser)

    config = SimConfig(
        _channel(args, scenario, parser),
        _kind(args, scenario),
        _pick(args.samples, scenario.samples),
        _pick(args.seed, scenario.seed),
        _pick(args.workers, scenario.workers),
    )

    report = run_simulation(config)

    comparison = report.comparison()

    if args.save is not None:

        report.write_to(args.save)

    if args.json:

        out = report.settings
        out["samples"] = report.samples
        out["rows"] = {
            name: {column: float(value) for column, value in row.items()}
            for name, row in comparison.iterrows()
        }

        print(_dumps(out))

    else:

        print(report.table.to_string())
        print()
        print(comparison.to_string())


def cmd_plot(args, parser):

    curve = read_threshold_csv(args.in_file)

    render_threshold_svg(curve, args.out)


_COMMANDS = {
    "attack": cmd_attack,
    "thresholds": cmd_thresholds,
    "montecarlo": cmd_montecarlo,
    "plot": cmd_plot,
}


def main(argv=None):
    """
    run the command line and return the exit code

    :param argv: arguments without the program name
    :returns:
    :rtype: int

    """

    parser = build_parser()

    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr
    )

    try:

        _COMMANDS[args.command](args, parser)

    except DomainError as e:

        print(f"pycvqkd: domain error: {e}", file=sys.stderr)

        return EXIT_DOMAIN

    except MalformedDataError as e:

        print(f"pycvqkd: malformed input: {e}", file=sys.stderr)

        return EXIT_MALFORMED

    except yaml.YAMLError as e:

        print(f"pycvqkd: malformed configuration: {e}", file=sys.stderr)

        return EXIT_MALFORMED

    except OSError as e:

        print(f"pycvqkd: I/O error: {e}", file=sys.stderr)

        return EXIT_IO

    return EXIT_OK
