"""Central logging utility for magnon_benchkit.

Provides a get_logger() helper and setup_logging() to configure handlers.
Library modules log through child loggers ("magnon_benchkit.<module>").
"""

from __future__ import annotations

import logging
import pathlib
import sys
from logging.handlers import RotatingFileHandler

_DEFAULT_FORMAT = "[%(levelname).1s %(asctime)s] %(message)s"

_logger = logging.getLogger("magnon_benchkit")

_def_handler: logging.Handler | None = None
_file_handler: logging.Handler | None = None


def setup_logging(
    verbose: bool = False,
    stream=None,
    log_file: str | pathlib.Path | None = None,
    max_bytes: int = 256_000,
    backups: int = 3,
):
    global _def_handler, _file_handler
    lvl = logging.DEBUG if verbose else logging.INFO
    _logger.setLevel(lvl)
    if _def_handler is not None:
        _logger.removeHandler(_def_handler)
    h = logging.StreamHandler(stream or sys.stderr)
    h.setFormatter(logging.Formatter(_DEFAULT_FORMAT, datefmt="%H:%M:%S"))
    h.setLevel(lvl)
    _logger.addHandler(h)
    _def_handler = h
    if _file_handler is not None:
        _logger.removeHandler(_file_handler)
        _file_handler.close()
        _file_handler = None
    if log_file is not None:
        path = pathlib.Path(log_file)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fh = RotatingFileHandler(path, maxBytes=max_bytes, backupCount=backups)
        except OSError as exc:
            _logger.warning("Cannot open log file %s: %s", path, exc)
        else:
            fh.setFormatter(logging.Formatter(_DEFAULT_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
            fh.setLevel(lvl)
            _logger.addHandler(fh)
            _file_handler = fh
    _logger.debug("Logging initialized (verbose=%s)", verbose)
    return _logger


def get_logger():
    return _logger
