"""Exception types raised by the library."""


class InvariantError(ValueError):
    """A value violates one of its documented invariants."""


class CapacityError(ValueError):
    """A requested count does not fit on the grid."""


class ShapeError(ValueError):
    """Grid dimensions of two operands disagree."""


class DomainError(ValueError):
    """A numeric argument lies outside the domain of a formula."""


class OverdeterminationError(ValueError):
    """The least-squares system would have more unknowns than equations."""


class IllConditionedError(ArithmeticError):
    """The least-squares system is numerically rank deficient.

    The condition estimate (ratio of extreme singular values) is kept on
    ``condition``.
    """

    def __init__(self, condition, message=None):
        self.condition = float(condition)
        super().__init__(message or f"least-squares system is ill conditioned (cond={self.condition:.3e})")
