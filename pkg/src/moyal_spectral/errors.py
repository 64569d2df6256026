"""Exception and warning types raised by moyal_spectral."""


class MoyalError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(MoyalError, ValueError):
    pass


class InvalidInputError(MoyalError, ValueError):
    pass


class InvalidPairError(MoyalError, ValueError):
    """Raised when two operands disagree on dimension or theta."""


class TruncationOverflowError(MoyalError):
    """Raised when a state or translation does not fit the truncated Fock space."""


class InsufficientTruncationError(MoyalError):
    pass


class InvalidWitnessError(MoyalError):
    pass


class PreconditionFailedError(MoyalError):
    pass


class SingularParameterError(MoyalError, ZeroDivisionError):
    pass


class InconsistentEstimateError(MoyalError):
    """A bound contradicts an analytic result; usually a truncation artifact."""


class AccuracyWarning(UserWarning):
    pass
