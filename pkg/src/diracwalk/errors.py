"""Exception types shared across the package.

All argument/precondition violations derive from ``DomainError`` (a
``ValueError``), which the CLI maps to exit code 2.  Violations of runtime
numerical tolerances raise ``NumericalCheckError`` (exit code 3).
"""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateModeError(DomainError):
    """A spinor or mode basis was requested at an exactly degenerate point."""


class OccupancyError(DomainError):
    """A mode event list is inconsistent with any occupation history."""


class InfeasibleError(DomainError):
    """No parameter value satisfies the requested constraint margin."""


class NumericalCheckError(RuntimeError):
    """A runtime numerical check (norm drift, unitarity, ...) failed."""
