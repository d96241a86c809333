"""Exception and warning types shared across the package."""


class InvalidDimensionError(ValueError):
    pass


class InvalidParameterError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


class DomainError(ValueError):
    """A field or energy was requested at a point the model cannot describe."""


class NoEquilibriumError(RuntimeError):
    pass


class CrossCheckFailure(RuntimeError):
    pass


class DerivativeStepError(RuntimeError):
    pass


class AncillaLeakageError(RuntimeError):
    pass


class StepSizeError(RuntimeError):
    pass


class ConfigError(ValueError):
    pass


class TruncationWarning(UserWarning):
    pass


class IllConditionedWarning(UserWarning):
    pass


class ResolutionWarning(UserWarning):
    pass


class RegimeMixingWarning(UserWarning):
    pass
