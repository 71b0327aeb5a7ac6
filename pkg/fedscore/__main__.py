import argparse
import sys

from fedscore import FedScore
from fedscore import logging as fedscore_logging
from fedscore.errors import ConfigInvalid, FedScoreError

logger = fedscore_logging.get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG_INVALID = 1
EXIT_RUNTIME_ERROR = 2


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return seed


def _positive(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--log-dir',
        dest='log_dir',
        help='Override log directory (default: {out}/logs for run, console only otherwise).'
    )
    parser.add_argument(
        '--settings',
        dest='settings_file',
        help='Runtime settings TOML (default: $FEDSCORE_CONFIG, ./fedscore.toml, bundled defaults).'
    )


def parse_run(parser):
    parser.add_argument('--config', '-c', required=True, help='Experiment config JSON')
    parser.add_argument('--out', '-o', default=None,
                        help='Output directory for report.json and the CSV views')
    parser.add_argument('--seed', type=_seed, default=None,
                        help='Master seed; overrides $FEDSCORE_SEED and the config value')
    parser.add_argument('--workers', type=_positive, default=None,
                        help='Concurrent client workers; results do not depend on it')


def parse_validate(parser):
    parser.add_argument('--config', '-c', required=True, help='Experiment config JSON')


def parse_gen_data(parser):
    parser.add_argument('--spec', required=True, help='Synthetic data spec JSON')
    parser.add_argument('--out', '-o', required=True, help='Destination CSV')
    parser.add_argument('--seed', type=_seed, required=True, help='Master seed')


def parse_summarize(parser):
    parser.add_argument('--report', required=True, help='report.json or the directory holding it')


def _dispatch(args) -> None:
    common = {"settings_file": args.settings_file, "log_dir_override": args.log_dir}
    match args.subcommand:
        case 'run':
            FedScore.run(config_path=args.config, out_dir=args.out, seed=args.seed,
                         workers=args.workers, **common)
        case 'validate':
            FedScore.validate(config_path=args.config, **common)
        case 'gen-data':
            FedScore.gen_data(spec_path=args.spec, out_path=args.out, seed=args.seed, **common)
        case 'summarize':
            FedScore.summarize(report_path=args.report, **common)


def _report_error(exc: BaseException) -> None:
    logger.error("%s: %s", type(exc).__name__, exc)
    for note in getattr(exc, "__notes__", ()):
        logger.error("  %s", note)


def main(argv: list[str] | None = None) -> int:
    common_parent = argparse.ArgumentParser(add_help=False)
    add_common_arguments(common_parent)

    parser = argparse.ArgumentParser(
        description='fedscore: score-consensus federated learning simulator',
    )

    subparsers = parser.add_subparsers(
        dest='subcommand',
        description='valid subcommands',
        help='Use one of these subcommands followed by -h for additional help',
        required=True
    )

    parse_run(subparsers.add_parser('run', help='Run an experiment and write its report',
                                    parents=[common_parent]))
    parse_validate(subparsers.add_parser('validate', help='Check an experiment config',
                                         parents=[common_parent]))
    parse_gen_data(subparsers.add_parser('gen-data', help='Write synthetic label pools as CSV',
                                         parents=[common_parent]))
    parse_summarize(subparsers.add_parser('summarize', help='Print the per-user accuracy table of a report',
                                          parents=[common_parent]))

    args = parser.parse_args(argv)

    try:
        _dispatch(args)
    except ConfigInvalid as exc:
        _report_error(exc)
        return EXIT_CONFIG_INVALID
    except (FedScoreError, OSError, ValueError, FloatingPointError) as exc:
        _report_error(exc)
        return EXIT_RUNTIME_ERROR
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
