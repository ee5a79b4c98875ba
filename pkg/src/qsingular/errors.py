"""Exception hierarchy shared across the toolkit.

Validation problems subclass :class:`ValueError`; numerical breakdowns subclass
:class:`NumericalError`.  The CLI maps the two families onto distinct exit codes.
"""


class NumericalError(ArithmeticError):
    """A computation failed to converge or became ill-defined."""


class ConvergenceError(NumericalError):
    pass


class PoleError(ValueError):
    """Function evaluated at a pole (e.g. Gamma at a non-positive integer)."""


class TooManyRootsError(NumericalError):
    pass


class TrackingAmbiguityError(NumericalError):
    """Level continuation could not be made unambiguous; retry with more steps."""


class NotAnholonomyError(NumericalError):
    pass
