"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class PoleError(DomainError):
    """tan(|z|) pole: eta is undefined where cos|z| = 0."""


class NoClosedFormError(DomainError):
    """Raised for t != 0 queries; only the oracle evaluates W(z,t), V(z,t)."""


class SingularExchangeError(DomainError):
    """The exchange-relation denominator f vanishes."""


class TailNotConvergedError(RuntimeError):
    """An infinite series was cut before its terms became negligible."""


class NoConvergence(RuntimeError):
    """The oracle hit its cutoff cap before successive values agreed.

    The last value and its error estimate are kept so callers can report them.
    """

    def __init__(self, message, value=None, dim_used=None, est_error=None):
        super().__init__(message)
        self.value = value
        self.dim_used = dim_used
        self.est_error = est_error
