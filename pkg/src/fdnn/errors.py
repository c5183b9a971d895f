"""Exception hierarchy shared by all fdnn modules."""


class FdnnError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(FdnnError, ValueError):
    """An argument violates a documented precondition."""


class IncompatibleGridsError(FdnnError):
    """Two functional objects do not live on the same sampling grid."""


class EmptyClassError(FdnnError):
    """An operation required samples of a class label that is absent."""


class InsufficientDataError(FdnnError):
    """Not enough samples to carry out the estimation."""


class DegenerateDataError(FdnnError):
    """Data collapsed to a degenerate configuration (e.g. zero spread)."""


class NumericalFailureError(FdnnError):
    """A numerical routine produced results outside its tolerance."""


class DataFormatError(FdnnError):
    """A data, model or config file could not be parsed.

    Messages carry ``path:line:`` context where available.
    """
