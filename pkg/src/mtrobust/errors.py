"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ``DataError`` -> 2, ``TranslatorError`` -> 3.
"""


class DataError(ValueError):
    """Malformed or inconsistent input data (bad encoding, length mismatch, ...)."""


class TranslatorError(RuntimeError):
    """The system under test failed, timed out, or returned the wrong number of lines."""


class UndefinedMetricError(ArithmeticError):
    """A metric is undefined on the given data, e.g. ROBUST with TQ(original) = 0."""
