"""Exception types shared across the toolkit.

The command-line layer maps these onto process exit codes: configuration
and path problems exit 2, degenerate data exits 3, numeric failures exit 4.
"""


class RelrankError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(RelrankError):
    """Invalid configuration, schema/shape mismatch, or unusable path."""


class DataError(RelrankError):
    """Degenerate data: single-class sets, empty splits, zero-gain sessions."""


class NumericError(RelrankError):
    """Non-finite loss, gradient, or score."""


class SkippableBatch(RelrankError):
    """A batch that cannot drive the pairwise loss (single class present).

    Training loops catch this, skip the batch, and count the skip; it is a
    flow-control signal rather than a hard failure.
    """
