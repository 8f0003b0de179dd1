import sys
import logging
import argparse
from pathlib import Path

from raypath import __version__
from raypath.services.config import Config, DEFAULT_CONFIG_PATH
from raypath.shared.errors import RaypathError, UsageError
from raypath.utils.files import atomic_write_text
from raypath.utils.log_print import LogPrint

from .commands import COMMANDS, CommandResult

logger = logging.getLogger("raypath_cli")

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_USAGE_ERROR = 2


def build_parser():
    """Top-level parser plus one subparser per command (returned by name)."""
    parser = argparse.ArgumentParser(
        prog="raypath", description="Per-raypath range ambiguity analysis for spinning lidar data"
    )
    parser.add_argument('--version', action='version', version=f'raypath {__version__}')
    parser.add_argument('--config', help=f"JSON config file (default {DEFAULT_CONFIG_PATH} when present)")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v for progress, -vv for debug output")
    parser.add_argument('--no-color', action='store_true', help="Plain console messages")
    subparsers = parser.add_subparsers(dest='command', required=True)

    commands = {}
    for command_class in COMMANDS:
        sub = subparsers.add_parser(command_class.name, help=command_class.help, description=command_class.help)
        command_class.add_arguments(sub)
        sub.add_argument('--out', help="Output directory (default: print the main result to stdout)")
        sub.set_defaults(command_class=command_class)
        commands[command_class.name] = sub
    return parser, commands


def _config_path(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config')
    known, _ = pre.parse_known_args(argv)
    return known.config


def apply_config(commands, config: Config) -> None:
    """Make configured values the defaults of their subcommand; flags given on the command line still win."""
    for name, sub in commands.items():
        defaults = config.defaults_for(name)
        dests = {action.dest for action in sub._actions}
        for key in sorted(set(defaults) - dests):
            logger.warning("ignoring config key %r: %s has no such flag", key, name)
        sub.set_defaults(**{k: v for k, v in defaults.items() if k in dests and k != "help"})


def setup_logging(verbose: int, log_level: str) -> None:
    level = getattr(logging, log_level) if not verbose else max(logging.WARNING - 10 * verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def write_outputs(result: CommandResult, out_dir, log_print: LogPrint) -> None:
    if out_dir:
        for name, text in result.outputs.items():
            path = atomic_write_text(Path(out_dir) / name, text)
            log_print.info(f"wrote {path}")
    elif result.primary is not None:
        sys.stdout.write(result.outputs[result.primary])
        sys.stdout.flush()


def run(argv, log_print: LogPrint) -> int:
    parser, commands = build_parser()
    config = Config(_config_path(argv))
    log_print.use_colors = config.use_colors
    apply_config(commands, config)
    args = parser.parse_args(argv)
    if args.no_color:
        log_print.use_colors = False
    setup_logging(args.verbose, config.log_level)

    log_print.header(f" raypath {args.command} ")
    command = args.command_class(log_print)
    result = command.run(args)
    if not result.success:
        log_print.error(result.message)
        return EXIT_DATA_ERROR
    write_outputs(result, args.out, log_print)
    log_print.success(result.message)
    return EXIT_OK


def main(argv=None) -> int:
    """Console entry point. Exit codes: 0 success, 1 data or domain error, 2 usage error."""
    log_print = LogPrint(with_time=False)
    try:
        return run(argv, log_print)
    except UsageError as e:
        log_print.error(f"usage error: {e}")
        return EXIT_USAGE_ERROR
    except (RaypathError, OSError) as e:
        log_print.error(f"error: {e}")
        return EXIT_DATA_ERROR
    except SystemExit as e:
        # argparse exits 0 for --help/--version and 2 for malformed flags
        if e.code is None:
            return EXIT_OK
        return e.code if e.code in (EXIT_OK, EXIT_DATA_ERROR, EXIT_USAGE_ERROR) else EXIT_USAGE_ERROR
    except Exception as e:
        log_print.error(f"unexpected error: {e!r}")
        logger.debug("unhandled exception", exc_info=True)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
