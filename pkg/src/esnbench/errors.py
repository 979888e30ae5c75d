"""Exception types shared across the package.

ValueError is used for ordinary argument/shape violations; the classes here
mark failures that callers (and the CLI) may want to distinguish.
"""


class BenchError(Exception):
    """Base class for categorized failures raised by this package."""

    @property
    def category(self) -> str:
        return type(self).__name__


class SchemaError(BenchError):
    """Input file is missing required columns or carries unexpected ones."""


class DataParseError(BenchError):
    """A cell could not be parsed as a finite number."""


class LabelError(BenchError):
    """A status value outside {0, 1}."""


class ReservoirInitError(BenchError):
    """Drawn recurrent matrix cannot be rescaled (spectral radius ~ 0)."""
