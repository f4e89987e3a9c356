"""Exception hierarchy shared across the toolkit."""


class TrendvalError(Exception):
    """Base class for all toolkit errors."""


class InputError(TrendvalError):
    """Malformed or inconsistent input data (CLI exit code 1)."""


class StageError(TrendvalError):
    """A pipeline stage could not complete (CLI exit code 2)."""


class DegenerateInputError(TrendvalError):
    """A statistic is undefined on this input (e.g. an all-tied series)."""
