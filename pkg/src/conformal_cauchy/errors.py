"""Exception hierarchy shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InvalidParameterError(DomainError):
    """A distribution or transformation parameter is not admissible."""


class DensityUndefinedError(DomainError):
    """The parameter describes a point mass; no density w.r.t. Lebesgue/surface measure exists."""


class SingularInputError(DomainError):
    """The input is a singular point of the map or density (a measure-zero set)."""


class NonConvergenceError(RuntimeError):
    """A numerical procedure exhausted its budget before reaching tolerance."""
