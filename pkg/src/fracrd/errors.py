"""Exception types shared across the package."""


class FracRDError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FracRDError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedParameterError(DomainError):
    """Parameters are outside the validated (alpha, z) box of an evaluator."""


class StepFailureError(FracRDError):
    """A time step could not be completed (non-positive implicit coefficient,
    overflow past the blow-up threshold, or a failed linear solve)."""


class ConvergenceError(FracRDError):
    """An iteration failed to converge within its budget."""


class AssemblyError(FracRDError):
    """An assembled operator violates a structural invariant."""


class ConfigError(FracRDError, ValueError):
    """A configuration file is malformed or out of range.

    Carries the offending key (and section, when known) so callers can
    report actionable context.
    """

    def __init__(self, message, *, key=None, section=None):
        self.key = key
        self.section = section
        prefix = ""
        if section is not None:
            prefix += f"[{section}] "
        if key is not None:
            prefix += f"key '{key}': "
        super().__init__(prefix + message)
