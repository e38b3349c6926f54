# -*- coding: utf-8 -*-
"""
A module with common functions: logging setup, pickling helpers, resource
limits and the exceptions shared by the package.
"""
import os
import pickle
import logging
import warnings
from collections import namedtuple

logger = logging.getLogger("rpdsmc")


# Resource guards. Every field has a matching command line flag.
Limits = namedtuple("Limits", ["max_k", "max_annotator_states", "max_product_rules",
                               "max_nodes", "max_stack", "witness_nodes"],
                    defaults=(3, 2 ** 16, 2 ** 20, 10 ** 5, 32, 20000))


class FormatError(ValueError):
    """ Error raised by the text formats, positioned in the input.
    """
    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ":".join(str(x) for x in (path or "<text>", line, column) if x is not None)
        super().__init__("{0}: {1}".format(where, message))


class LtlSyntaxError(ValueError):
    def __init__(self, message, position):
        self.position = position
        super().__init__("{0} (at offset {1})".format(message, position))


class ImproperIdError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    """ A resource guard was exceeded; `kind` names the guard.
    """
    def __init__(self, kind, message):
        self.kind = kind
        super().__init__(message)


def get_pickle_obj(path):
    with open(path, 'rb') as f:
        obj = pickle.load(f)
    return obj


def save_pickle_obj(obj, path):
    """ Pickle an object, creating the destination directory if needed.

    Parameters
    ----------
    obj: object
        any picklable object (reduced systems, verdicts, histories).
    path: str
        the destination file.

    Returns
    -------
    path: str
        the written file.
    """
    outdir = os.path.dirname(path)
    if outdir and not os.path.isdir(outdir):
        os.makedirs(outdir)
        logger.info("Directory %s created." % outdir)
    with open(path, "wb") as f:
        pickle.dump(obj, f, protocol=4)
    return path


def setup_logging(level="info", logfile=None):
    """ Setup the logging.

    Parameters
    ----------
    level: str, default 'info'
        the logging level name.
    logfile: str, default None
        the log file.
    """
    LEVELS = {
        "debug": logging.DEBUG,
        "info": logging.INFO,
        "warning": logging.WARNING,
        "error": logging.ERROR,
        "critical": logging.CRITICAL
    }
    logging_format = logging.Formatter(
        "[%(asctime)s] {%(pathname)s:%(lineno)d} %(levelname)s - "
        "%(message)s", "%Y-%m-%d %H:%M:%S")
    while len(logger.handlers) > 0:
        logger.removeHandler(logger.handlers[-1])
    level = LEVELS.get(level, None)
    if level is None:
        raise ValueError("Unknown logging level.")
    logger.setLevel(level)
    stream_handler = logging.StreamHandler()
    stream_handler.setLevel(level)
    stream_handler.setFormatter(logging_format)
    logger.addHandler(stream_handler)
    if logfile is not None:
        file_handler = logging.FileHandler(logfile, mode="a")
        file_handler.setLevel(level)
        file_handler.setFormatter(logging_format)
        logger.addHandler(file_handler)
    if level != logging.DEBUG:
        warnings.simplefilter("ignore", DeprecationWarning)
