"""Exception hierarchy shared across the pipeline.

Every error raised on a contract violation derives from DlprError so the
CLI can map failures onto its exit codes (1 usage, 2 data, 3 numeric).
"""


class DlprError(Exception):
    """Base class for all pipeline errors."""


class DataError(DlprError):
    """Bad or inconsistent input data (CLI exit code 2)."""


class NumericError(DlprError):
    """Numerical failure such as a NaN loss (CLI exit code 3)."""


class InvalidWindow(DataError):
    """Window too short for the requested operation."""


class NonFiniteInput(DataError):
    """NaN or Inf encountered where finite values are required."""


class ChannelMismatch(DataError):
    """Channel windows disagree in length or count."""


class ShapeError(DataError):
    """Tensor shapes inconsistent with the layer specification."""


class StateError(DlprError):
    """Operation invoked out of order (e.g. backward before forward)."""


class PoolError(DataError):
    """Pooling input length not divisible by the pool size."""


class BatchTooSmall(DataError):
    """Batch statistics requested on a batch of fewer than 2 samples."""


class NotFitted(StateError):
    """Classifier used before fit()."""


class DegenerateData(DataError):
    """Covariance singular even after regularization."""


class EmptyOutput(DataError):
    """An operation would produce no output (e.g. recording shorter than one window)."""


class StratifyError(DataError):
    """A class has too few windows for a stratified split."""


class ParseError(DataError):
    """Malformed CSV or metadata file; message carries the location."""


class ConfigError(DataError):
    """Invalid configuration value or incompatible model/data pairing."""
