# -*- coding: utf-8 -*-

""" Logger factory shared by the solvers, the session driver and the
command-line front end.

Records go to standard-error, and optionally to syslog, so that the front end
keeps standard-out for its `key=value` results. Multi-start solves run on a
thread pool so the thread name is part of every record.
"""

import os
import sys
import logging
import logging.handlers

import colorlog


PACKAGE_NAME = "adaptpriv"

PROJECT_NAME = "adaptive-privacy"

FMT_RECORD = (
    "{0}: %(asctime)-15s %(threadName)s %(levelname)-8s %(name)s "
    "%(funcName)s %(message)s"
)

FMT_DATE = "%Y-%m-%dT%H:%M:%SZ"

LEVEL_COLORS = {
    "DEBUG": "cyan",
    "INFO": "green",
    "WARNING": "yellow",
    "ERROR": "red",
    "CRITICAL": "red,bg_white",
}

PATH_SYSLOG = "/dev/log"


def _formatter(project_name: str, do_color: bool) -> logging.Formatter:
    # Assemble the record format.
    fmt = FMT_RECORD.format(project_name)

    # Records without colours (syslog or a plain terminal).
    if not do_color:
        return logging.Formatter(fmt=fmt, datefmt=FMT_DATE)

    # Colour the whole record by its level.
    return colorlog.ColoredFormatter(
        fmt="%(log_color)s" + fmt,
        datefmt=FMT_DATE,
        reset=True,
        log_colors=LEVEL_COLORS,
    )


def create_logger(
        logger_name: str,
        logger_level: str = "INFO",
        project_name: str = PROJECT_NAME,
        do_log_stream: bool = True,
        do_log_syslog: bool = False,
        do_color_logs: bool = True,
) -> logging.Logger:
    """ Creates or retrieves a package logger

    Loggers are keyed by name, so calling this again for an existing logger
    only updates its level and leaves its handlers untouched.

    Args:
        logger_name (str): Name of the logger, usually the module's
            `__name__`.
        logger_level (str): Level name as understood by `logging`.
        project_name (str): Prefix of every record.
        do_log_stream (bool, optional): Whether to attach a standard-error
            handler. Defaults to `True`.
        do_log_syslog (bool, optional): Whether to attach a syslog handler.
            Ignored when no syslog socket exists. Defaults to `False`.
        do_color_logs (bool, optional): Whether the standard-error handler
            colours records by level.

    Returns:
        logging.Logger: The logger.
    """

    # Create the logger with the appropriate name.
    logger = logging.getLogger(name=logger_name)

    # Set the log-level.
    logger.setLevel(logger_level)

    # A logger that already has handlers (module reloads, repeated calls) is
    # returned as is.
    if logger.handlers:
        return logger

    # Create a standard-error handler, set its format, and add it to the
    # logger (if enabled).
    if do_log_stream:
        handler_stream = logging.StreamHandler(sys.stderr)
        handler_stream.setFormatter(
            _formatter(project_name=project_name, do_color=do_color_logs)
        )
        logger.addHandler(handler_stream)

    # Create a syslog handler with the colour-less format and add it to the
    # logger (if enabled and the socket exists). Colour codes are unreadable
    # in syslog.
    if do_log_syslog and os.path.exists(PATH_SYSLOG):
        handler_syslog = logging.handlers.SysLogHandler(address=PATH_SYSLOG)
        handler_syslog.setFormatter(
            _formatter(project_name=project_name, do_color=False)
        )
        logger.addHandler(handler_syslog)

    # Records are handled here only, not again by the root logger.
    logger.propagate = False

    return logger


def set_level(logger_level: str) -> None:
    """ Updates the level of every logger created under the package."""

    # Only loggers under the package namespace are touched.
    for name in list(logging.root.manager.loggerDict.keys()):
        if name == PACKAGE_NAME or name.startswith(PACKAGE_NAME + "."):
            logging.getLogger(name).setLevel(logger_level)
