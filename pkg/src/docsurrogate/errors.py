"""Exception hierarchy.

Two families matter to callers (and map onto CLI exit codes):

* :class:`InputError` -- bad files, bad shapes, bad arguments (exit code 2).
* :class:`DomainError` -- numerical failures while computing something
  from valid inputs: convergence, conditioning, undefined metrics (exit code 1).
"""


class DocSurrogateError(Exception):
    """Base class for all package errors."""


class InputError(DocSurrogateError):
    pass


class DomainError(DocSurrogateError):
    pass


class ImageFormatError(InputError):
    """Missing, truncated or unsupported raster file."""


class NotBilevelError(ImageFormatError):
    pass


class DimensionMismatchError(InputError, ValueError):
    pass


class ManifestError(InputError):
    pass


class ModelFormatError(InputError):
    pass


class EmptyClassError(DomainError):
    """A rate denominator is zero (no positives or no negatives in the reference)."""


class FeatureError(DomainError):
    pass


class ConditioningError(DomainError):
    pass


class ConvergenceError(DomainError):
    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class RrseUndefinedError(DomainError):
    """Actual values are constant, so RRSE has a zero denominator.

    The absolute errors are still well defined and are attached.
    """

    def __init__(self, message, mae, rmse):
        super().__init__(message)
        self.mae = mae
        self.rmse = rmse
