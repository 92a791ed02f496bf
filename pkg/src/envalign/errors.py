"""Exception types shared across the package.

Every error raised on purpose derives from EnvAlignError so callers (and the
command line front end) can tell domain failures apart from genuine bugs.
"""

from __future__ import annotations


class EnvAlignError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(EnvAlignError, ValueError):
    """A parameter or configuration value is outside its legal range."""


class InsufficientDataError(EnvAlignError, ValueError):
    """The input series is too short for the requested operation."""


class DegenerateSignalError(EnvAlignError, ValueError):
    """The signal carries no usable content (for example, all zeros)."""


class InsufficientOverlapError(EnvAlignError, ValueError):
    """Shifted envelopes share too little common support to be compared."""


class NoFeasibleAnchorError(EnvAlignError, RuntimeError):
    """No anchor threshold on the search grid produced a valid alignment."""


class EmptyInputError(EnvAlignError, ValueError):
    """An operation that needs at least one element received none."""


class NoSegmentsError(EnvAlignError, RuntimeError):
    """Segmentation produced no usable segments."""


class InputFormatError(EnvAlignError, ValueError):
    """An input file could not be parsed into a series."""
