"""Exception types shared across the package."""


class CapacityError(ValueError):
    """An exact enumeration would exceed its configured budget."""


class GenerationError(RuntimeError):
    """A randomized graph generator exhausted its retry budget."""


class NumericalError(ArithmeticError):
    """A numeric invariant failed while evaluating an observable."""
