"""Exception types raised by the kernel library."""


class DomainError(ValueError):
    """Argument outside the domain where a formula is defined."""


class RankError(ValueError):
    """Positive multiplicity requested in more than one dimension."""


class ConvergenceError(RuntimeError):
    """A series did not reach its tolerance within the term cap."""


class InvariantError(ValueError):
    """A group element or computed value broke a structural invariant."""


class MeasureMismatchError(ValueError):
    """A quadrature rule was used against the wrong measure."""
