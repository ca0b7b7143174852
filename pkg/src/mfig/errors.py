"""Exception types raised across the toolkit."""


class MfigError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgumentError(MfigError, ValueError):
    pass


class DomainError(MfigError, ValueError):
    """An argument lies outside the domain of a mean or energy."""


class BoundaryError(MfigError, ValueError):
    """A point of the simplex is too close to its boundary."""


class SingularMeanError(MfigError, ArithmeticError):
    pass


class DivergenceError(MfigError, ArithmeticError):
    """An improper integral failed to converge under refinement."""


class PreconditionError(MfigError, ValueError):
    pass


class AssumptionViolatedError(MfigError, ArithmeticError):
    pass


class DisconnectedGraphError(MfigError, ValueError):
    pass
