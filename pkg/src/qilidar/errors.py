"""Exception types shared across the package."""


class QiLidarError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(QiLidarError, ValueError):
    """A physical parameter is NaN, infinite or outside its allowed range."""


class DegenerateRegimeError(QiLidarError):
    """A click probability sits at 0 or 1, so log-likelihood coefficients diverge."""


class IndistinguishableError(DegenerateRegimeError):
    """Object present and absent hypotheses coincide; no finite shot count separates them."""


class GaussianRegimeError(QiLidarError):
    """The binomial-to-Gaussian approximation criterion is violated.

    Carries the offending skew value in ``skew``.
    """

    def __init__(self, message: str, skew: float):
        super().__init__(message)
        self.skew = skew


class ConfigError(QiLidarError, ValueError):
    """Invalid scenario configuration; ``field`` holds the offending field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
