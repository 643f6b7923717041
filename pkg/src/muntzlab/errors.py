"""Exception hierarchy for muntzlab."""


class MuntzLabError(Exception):
    """Base class for all library errors."""


class DomainError(MuntzLabError, ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidLacunarityError(DomainError):
    """A ratio parameter that must exceed 1 does not."""


class EmptySequenceError(DomainError):
    pass


class NotQuasiLacunaryError(MuntzLabError):
    """No onset index makes the block ratio condition hold."""


class UnknownExponentError(MuntzLabError, KeyError):
    pass


class UndefinedConstantError(MuntzLabError):
    pass


class PreconditionError(MuntzLabError):
    """Inputs are valid but a mathematical hypothesis is not satisfied."""


class AccuracyError(MuntzLabError):
    """A numerical procedure did not reach its tolerance.

    ``estimate`` and ``error`` hold the best value found and its error
    estimate.
    """

    def __init__(self, msg, estimate=None, error=None):
        super().__init__(msg)
        self.estimate = estimate
        self.error = error


class NonConvergenceError(MuntzLabError):
    """Optimizer and random sampler disagree beyond tolerance."""

    def __init__(self, msg, optimizer_value=None, sampler_value=None):
        super().__init__(msg)
        self.optimizer_value = optimizer_value
        self.sampler_value = sampler_value


class TruncationError(MuntzLabError):
    def __init__(self, msg, bound=None):
        super().__init__(msg)
        self.bound = bound


class ConfigError(MuntzLabError):
    """Malformed experiment configuration."""
