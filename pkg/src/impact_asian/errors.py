"""Exception types raised by the pricing engine and the CLI."""

from __future__ import annotations


class PricingError(Exception):
    """Base class for every engine failure."""


class DegenerateLattice(PricingError):
    """Impact-adjusted up factor does not exceed the down factor."""


class ArbitrageViolation(PricingError):
    """The per-step rate lies outside [d_adj, u_adj], so p_adj is not a probability."""


class ZeroImpact(PricingError):
    """Minimal admissible volumes are undefined for lambda == 0.

    ``admissible`` carries the classical ``d <= r_step <= u`` verdict so callers
    can still report something useful.
    """

    def __init__(self, message: str, admissible: bool):
        super().__init__(message)
        self.admissible = admissible


class CapExceeded(PricingError):
    """Requested path enumeration is larger than the configured cap."""


class CountOverflow(PricingError):
    """Exact area counts would not fit in 64-bit integers."""


class NonPositiveInputs(PricingError, ValueError):
    """Closed-form benchmark called with a non-positive spot or negative volatility."""


class ConfigError(ValueError):
    """Bad run configuration (file or command line)."""


class UnknownKey(ConfigError):
    pass


class MissingRequired(ConfigError):
    pass


class InvalidValue(ConfigError):
    """A config value could not be converted to the key's type."""
