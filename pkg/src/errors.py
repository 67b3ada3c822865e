"""
Errors
======
Exception hierarchy. Each family carries the process exit code the CLI
reports when it escapes a run.
"""


class ChainsError(Exception):
    """Base class for every error raised by this package."""

    exit_code: int = 1

    def __init__(self, message: str, *, field: str | None = None):
        super().__init__(message)
        self.field = field

    def to_dict(self) -> dict:
        info = {"type": type(self).__name__, "error": str(self)}
        if self.field:
            info["field"] = self.field
        return info


# ─── Configuration (exit 2) ──────────────────────────────────────────────────

class ConfigError(ChainsError):
    exit_code = 2


class InvalidConfig(ConfigError):
    """Parse error, unknown key or out-of-range value in a config document."""

    def __init__(self, message: str, *, field: str | None = None, line: int | None = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(prefix + message, field=field)
        self.line = line


# ─── Model / numerical failures (exit 3) ─────────────────────────────────────

class ComputationError(ChainsError):
    exit_code = 3


class InvalidChain(ComputationError):
    pass


class InvalidProfile(ComputationError):
    pass


class UnsupportedModel(ComputationError):
    pass


class InvalidBlock(ComputationError):
    pass


class TooLarge(ComputationError):
    pass


class InvalidSubspace(ComputationError):
    pass


class FitUnderdetermined(ComputationError):
    pass


class FirstOrderNotZero(ComputationError):
    """Projected perturbation is nonzero; first-order degenerate PT applies."""


class NumericalFailure(ComputationError):
    pass


class DegenerateGroundState(ComputationError):
    """A Bogoliubov energy sits below the zero-mode threshold."""


# ─── Invariant violations (exit 4) ───────────────────────────────────────────

class InvariantViolation(ChainsError):
    exit_code = 4


class PhysicalityViolation(InvariantViolation):
    """A spectrum left its physical range by more than rounding."""
