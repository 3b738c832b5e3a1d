"""
Utilites funcions.
"""
import json
import logging
import os
import sys
from fractions import Fraction
from os.path import expanduser

from tqdm import tqdm

# Allow overriding the default run directory.
YSYS_DIR = os.getenv('YSYS_DIR') or '~/.ysys'

# The data directory for ysys
DATADIR = expanduser(YSYS_DIR)

# Largest rational function (in monomials) before giving up.
TERM_CAP = int(os.getenv('YSYS_TERM_CAP') or 10000)

# Cancel common factors after rational function arithmetic.
REDUCE = (os.getenv('YSYS_REDUCE') or '1') != '0'

# Random positive points used to pre-screen rational function equality.
SCREEN = int(os.getenv('YSYS_SCREEN') or 8)

# Seed for the random pre-screen.
SEED = int(os.getenv('YSYS_SEED') or 1)

# Version of the JSON reports.
SCHEMA_VERSION = 1


class YsysError(Exception):
    """
    Base class for errors that end a command.
    """
    code = 1


class ValidationError(YsysError):
    """
    The input does not describe a valid Y-datum or pair.
    """
    code = 2


class PropertyError(YsysError):
    """
    A mathematical property fails (symplectic, sign coherence, ...).
    """
    code = 3


class ResourceError(YsysError):
    """
    A size or search bound was exceeded.
    """
    code = 4


def plural(target, val=0, end='es'):
    """
    Make the target string plural
    """

    output = target if val == 1 else f"{target}{end}"

    return output


def fraction_text(value):
    """
    Renders a rational as 'p/q' or an integer.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def _default(obj):
    if isinstance(obj, Fraction):
        return fraction_text(obj)
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if hasattr(obj, "item"):
        # Numpy scalars.
        return obj.item()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(obj):
    """
    Deterministic JSON text.
    """
    return json.dumps(obj, indent=2, sort_keys=True, default=_default)


def progress(stream, desc, total=None):
    """
    Wraps a stream into a progress bar shown only for verbose runs.
    """
    quiet = logger.getEffectiveLevel() > logging.INFO
    return tqdm(stream, desc=f"# {desc}", total=total, disable=quiet, leave=False)


def get_logger(name="ysys", hnd=None, fmt=None, terminator='\n'):
    """
    Initializes a logger with a handler and formatter.
    """
    # Get the logger name.
    log = logging.getLogger(name)

    # Default logging level.
    log.setLevel(logging.WARNING)

    # The log handler.
    hnd = hnd or logging.StreamHandler()
    hnd.terminator = terminator

    # The logging formatter.
    fmt = fmt or logging.Formatter('# %(message)s')

    # Add formatter to handler
    hnd.setFormatter(fmt)

    # Add handler to logger
    log.addHandler(hnd)

    return log


def apply_debug_logger(name="main", hnd=None, fmt=None, terminator='\n'):
    """
    Switches a logger to debug level with a more detailed format.
    """
    # Get the logger name.
    log = logging.getLogger(name)

    # Default logging level.
    log.setLevel(logging.DEBUG)

    # Reset all handlers
    log.handlers = []

    # The log handler.
    hnd = hnd or logging.StreamHandler()

    hnd.terminator = terminator

    # The logging formatter.
    fmt = fmt or logging.Formatter('# %(module)s.%(funcName)s: %(message)s')

    # Add formatter to handler
    hnd.setFormatter(fmt)

    # Add handler to logger
    log.addHandler(hnd)

    return log


# Initialize the logger.
logger = get_logger("main")


def error(msg, logger=logger, stop=True, code=1):
    """
    The default error handler
    """
    logger.error(f"{msg}")
    if stop:
        sys.exit(code)
