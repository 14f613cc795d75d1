class BesselSubordError(Exception):
    """Base class for every error raised by bessel_subord."""

    pass


class DomainError(BesselSubordError, ValueError):
    """Raised when a parameter lies outside the domain of a formula."""

    pass


class PoleError(DomainError):
    """Raised when an argument sits on a pole of the Gamma function."""

    pass


class DegenerateDenominator(DomainError):
    """Raised when a closed-form denominator vanishes."""

    pass


class NormalizationError(BesselSubordError, ValueError):
    """Raised when a series is not of the required class-A form."""

    pass


class CenterMismatch(BesselSubordError, ValueError):
    """Raised when p(0) differs from the center of the target disk."""

    pass


class ConstraintError(BesselSubordError, ValueError):
    """Raised when an admissibility sample violates Re(L e^{-i theta}) >= (k-1)kM."""

    pass


class RatioGuardError(BesselSubordError):
    """Raised when too many grid points are skipped by the denominator guard."""

    pass


class NonFiniteError(BesselSubordError, ArithmeticError):
    """Raised when a computation would store NaN or Inf."""

    pass
