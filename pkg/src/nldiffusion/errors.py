"""Exception types raised across the package."""


class NLDiffusionError(Exception):
    """Base class for all package errors."""


class DomainError(NLDiffusionError, ValueError):
    """A concentration lies outside a diffusivity law's validity interval."""


class RangeError(NLDiffusionError, ValueError):
    """A Kirchhoff potential lies outside the range of the transform."""


class UnsupportedOrderError(NLDiffusionError, ValueError):
    pass


class UnsupportedBoundaryError(NLDiffusionError, ValueError):
    pass


class SeriesDivergenceError(NLDiffusionError, ArithmeticError):
    def __init__(self, order, message=None):
        self.order = order
        super().__init__(message or f"Taylor coefficients overflowed at order {order}")


class InstabilityError(NLDiffusionError, ArithmeticError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite values after step {step}")


class InsufficientDataError(NLDiffusionError, ValueError):
    pass


class NonlinearityRequiredError(NLDiffusionError, ValueError):
    pass


class ShapeError(NLDiffusionError, ValueError):
    pass


class ConfigError(NLDiffusionError, ValueError):
    pass
