"""Exception and warning types raised across the package."""


class PumpnetError(Exception):
    """Base class for all package errors."""


class SingularityError(PumpnetError):
    """An element response is non-finite at the requested frequency."""

    def __init__(self, message, element_index=None):
        super().__init__(message)
        self.element_index = element_index


class ConversionError(PumpnetError):
    pass


class IllConditionedCircuitError(PumpnetError):
    pass


class DegenerateCompositionError(PumpnetError):
    pass


class NonConvergenceError(PumpnetError):
    """Iterative solve stopped without meeting its tolerance."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class NonphysicalDerivativeError(PumpnetError):
    pass


class FitQualityError(PumpnetError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class HystereticRegimeError(PumpnetError):
    pass


class IdlerResonanceError(PumpnetError):
    pass


class UnreachableGainError(PumpnetError):
    pass


class InfeasibleDesignError(PumpnetError):
    def __init__(self, message, closest=None):
        super().__init__(message)
        self.closest = closest


class SchemaError(PumpnetError):
    pass


class NearSingularWarning(RuntimeWarning):
    """A response denominator is close to zero (e.g. the device is near oscillation)."""


class ClampWarning(RuntimeWarning):
    pass


class PumpPhaseWarning(RuntimeWarning):
    """Pump phase is large enough that dropping 4th and higher orders is questionable."""
