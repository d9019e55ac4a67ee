"""Exception hierarchy.

ConfigError maps to CLI exit code 1, NumericsError (and subclasses) to exit
code 2. Anything else is a bug and propagates.
"""


class SpinottoError(Exception):
    """Base class for all package errors."""


class ConfigError(SpinottoError):
    """Invalid or inconsistent user configuration."""


class NoWorkRegimeError(ConfigError):
    """Work field does not grow (B0 >= B1), so the cycle extracts no work."""


class NumericsError(SpinottoError):
    """A numerical procedure failed or did not converge."""


class QuadratureError(NumericsError):
    """Quadrature did not reach the requested tolerance."""


class PoleIterationError(NumericsError):
    """Self-consistent pole iteration did not converge."""


class CrossingError(NumericsError):
    """No switch-off crossing found within the allowed stroke window."""


class SolverError(NumericsError):
    """Integro-differential solver aborted (bad step or invariant violation)."""


class RecordGridError(SpinottoError):
    """Radiation records sampled on incompatible grids."""
