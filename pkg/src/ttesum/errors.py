"""Exception hierarchy shared by the engine and the CLI."""


class TTEError(Exception):
    """Base class for every error raised by ttesum."""


class DomainError(TTEError, ValueError):
    """Arguments outside the domain of a model or formula."""


class ConditioningError(DomainError):
    """Conditioning on a value where the conditioning density vanishes."""


class EstimationError(DomainError):
    """Moment estimator hits a boundary where the estimate does not exist."""


class NumericalError(TTEError, ArithmeticError):
    """A numerical routine failed to reach its tolerance."""


class QuadratureError(NumericalError):
    def __init__(self, message, *, estimate=None, abserr=None):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class RootFindError(NumericalError):
    def __init__(self, message, *, bracket=None):
        super().__init__(message)
        self.bracket = bracket
