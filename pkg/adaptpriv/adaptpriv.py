# coding: utf-8

"""Main module."""

import os
import sys
import argparse
from typing import List, Optional

import sentry_sdk

from adaptpriv import commands
from adaptpriv import excs
from adaptpriv.loggers import create_logger


logger = create_logger(logger_name=__name__)


class ArgumentParser(argparse.ArgumentParser):
    """ Argument parser raising `UsageError` instead of exiting."""

    def error(self, message):
        raise excs.UsageError(message)


def build_parser() -> ArgumentParser:
    argument_parser = ArgumentParser(
        prog="adaptpriv",
        description=("adaptive-privacy: privacy-utility optimal release "
                     "channels under individual and collusion leakage "
                     "budgets."),
    )
    argument_parser.add_argument(
        "--config",
        dest="config_file",
        help="configuration file (defaults to $ADAPTPRIV_CONFIG)",
        required=False,
    )
    argument_parser.add_argument(
        "--log-level",
        dest="log_level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        required=False,
    )
    argument_parser.add_argument(
        "--threads",
        dest="threads",
        type=int,
        default=os.cpu_count() or 1,
    )
    argument_parser.add_argument("--tol", dest="tol", type=float)
    argument_parser.add_argument("--max-iters", dest="max_iters", type=int)
    argument_parser.add_argument("--n-init", dest="n_init", type=int)
    argument_parser.add_argument("--seed", dest="seed", type=int)

    subparsers = argument_parser.add_subparsers(dest="command")

    subparsers.add_parser("validate", help="validate a configuration")

    parser_ba = subparsers.add_parser(
        "ba-run", help="solve at fixed multipliers",
    )
    parser_ba.add_argument("--mu1", dest="mu1", type=float, required=True)
    parser_ba.add_argument("--mu2", dest="mu2", type=float, required=True)
    parser_ba.add_argument("--out", dest="out", help="objective trace CSV")

    parser_trace = subparsers.add_parser(
        "trace", help="sweep a multiplier grid into a curve CSV",
    )
    parser_trace.add_argument("--out", dest="out", required=True)
    parser_trace.add_argument(
        "--timeshare", dest="timeshare", type=int, default=0,
    )

    parser_solve = subparsers.add_parser(
        "solve", help="solve for a leakage budget",
    )
    parser_solve.add_argument("--eps", dest="eps", type=float)
    parser_solve.add_argument("--delta", dest="delta", type=float)

    parser_session = subparsers.add_parser(
        "session", help="run a sequential release session",
    )
    parser_session.add_argument("--out", dest="out", help="transcript path")

    parser_reproduce = subparsers.add_parser(
        "reproduce", help="write the datasets of the shipped instance",
    )
    parser_reproduce.add_argument("--out-dir", dest="out_dir", required=True)

    return argument_parser


def run(arguments: argparse.Namespace) -> None:
    if arguments.threads < 1:
        raise excs.UsageError("--threads must be >= 1.")

    overrides = {
        "tol": arguments.tol,
        "max_iters": arguments.max_iters,
        "n_init": arguments.n_init,
        "rng_seed": arguments.seed,
        "threads": arguments.threads,
    }

    if arguments.command == "validate":
        commands.cmd_validate(
            fname_config_file=arguments.config_file,
            logger_level=arguments.log_level,
        )
    elif arguments.command == "ba-run":
        commands.cmd_ba_run(
            fname_config_file=arguments.config_file,
            mu1=arguments.mu1,
            mu2=arguments.mu2,
            fname_out=arguments.out,
            overrides=overrides,
            logger_level=arguments.log_level,
        )
    elif arguments.command == "trace":
        commands.cmd_trace(
            fname_config_file=arguments.config_file,
            fname_out=arguments.out,
            timeshare=arguments.timeshare,
            seed=arguments.seed or 0,
            overrides=overrides,
            threads=arguments.threads,
            logger_level=arguments.log_level,
        )
    elif arguments.command == "solve":
        commands.cmd_solve(
            fname_config_file=arguments.config_file,
            eps=arguments.eps,
            delta=arguments.delta,
            overrides=overrides,
            logger_level=arguments.log_level,
        )
    elif arguments.command == "session":
        commands.cmd_session(
            fname_config_file=arguments.config_file,
            fname_out=arguments.out,
            seed=arguments.seed,
            overrides=overrides,
            logger_level=arguments.log_level,
        )
    elif arguments.command == "reproduce":
        commands.cmd_reproduce(
            dir_out=arguments.out_dir,
            overrides=overrides,
            threads=arguments.threads,
            logger_level=arguments.log_level,
        )
    else:
        raise excs.UsageError("No command given.")


def report_error(exc: excs.AdaptPrivError) -> int:
    msg = "error: code={0} exit={1} message={2}"
    print(
        msg.format(exc.code, exc.exit_code, exc.message),
        file=sys.stderr,
    )

    return exc.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    try:
        arguments = build_parser().parse_args(argv)
        run(arguments=arguments)
    except excs.AdaptPrivError as exc:
        return report_error(exc=exc)
    except Exception as exc:
        logger.exception("Unhandled error.")
        sentry_sdk.capture_exception(exc)
        return report_error(exc=excs.UnhandledError(str(exc)))

    return 0


# main sentinel
if __name__ == "__main__":
    sys.exit(main())
