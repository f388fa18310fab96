"""Exception types raised across the package."""


class ChebpertError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(ChebpertError, ValueError):
    pass


class NumericDomainError(ChebpertError, ArithmeticError):
    """A function produced a non-finite value where a finite one is required."""


class ResolutionError(ChebpertError, RuntimeError):
    """A discretization is too coarse for the requested accuracy."""


class PrecisionLossError(ChebpertError, RuntimeError):
    pass


class AccuracyDomainError(ChebpertError, ValueError):
    """Evaluation point lies outside the region where the quadrature is trusted."""


class InsufficientDataError(ChebpertError, ValueError):
    pass
