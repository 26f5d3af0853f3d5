"""
Exception hierarchy for lava-sysid

Every error raised by the library derives from LavaError. The CLI maps the
exit_code attribute to the process exit status.
"""


class LavaError(Exception):
    """Base error for lava-sysid operations."""

    exit_code = 1


class ArgumentError(LavaError, ValueError):
    """An argument is out of range or inconsistent with another."""

    exit_code = 2


class SchemaError(LavaError):
    """Data or model file does not match the expected dimensions."""

    exit_code = 2


class ParseError(SchemaError):
    """A data row could not be parsed."""

    def __init__(self, message: str, row: int):
        super().__init__(message)
        self.row = row


class NumericError(LavaError, ArithmeticError):
    """Non-finite values or a numerically singular factorization."""

    exit_code = 3


class DivergenceError(NumericError):
    """Free-run simulation left the admissible output range."""

    def __init__(self, message: str, sample: int):
        super().__init__(message)
        self.sample = sample


class UndefinedMetricError(ArgumentError):
    """Metric is undefined for the given data (e.g. FIT on a constant channel)."""
