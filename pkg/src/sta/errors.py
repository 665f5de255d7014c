"""Exception hierarchy for the shortcut-design toolkit.

Every exception carries the process exit code the command line uses when it
reaches the top level: 1 for invalid input, 2 for numerical failures and 3 for
a missing protocol-file section.
"""

from typing import Optional


class ShortcutError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


class InvalidInputError(ShortcutError, ValueError):
    """Raised when parameters, grids or files are not acceptable."""

    exit_code = 1


class GridError(InvalidInputError):
    """Raised for malformed spatial grids."""


class GridMismatchError(GridError):
    """Raised when two wavefunctions live on different grids."""


class GridTooNarrowError(GridError):
    """Raised when a state does not decay before the grid boundary."""


class FockIndexError(InvalidInputError):
    """Raised for negative Fock indices or indices the grid cannot resolve."""


class NormalizationError(InvalidInputError):
    """Raised when a wavefunction that must be normalized is not."""


class ScalingFunctionError(InvalidInputError):
    """Raised when a scaling function is not strictly positive on its interval."""


class ProtocolError(InvalidInputError):
    """Raised for invalid frequency protocols or evaluations outside [0, t_f]."""


class PlanError(InvalidInputError):
    """Raised for propagation plans that cannot be executed as configured."""


class ZeroDetuningError(InvalidInputError):
    """Raised when the Raman detuning vanishes."""


class ConfigurationError(InvalidInputError):
    """Raised for invalid environment configuration."""


class ProtocolFileError(InvalidInputError):
    """Raised when a protocol file cannot be parsed or validated."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class MissingSectionError(InvalidInputError):
    """Raised when a command needs a protocol-file section that is absent."""

    exit_code = 3


class NumericalError(ShortcutError):
    """Raised when a numerical procedure fails."""

    exit_code = 2


class ErmakovBreakdownError(NumericalError):
    """Raised when the forward Ermakov integration fails or b(t) collapses."""

    def __init__(self, message: str, time: float):
        self.time = time
        super().__init__(f"{message} (t = {time:.6g})")


class SingularCounterdiabaticError(NumericalError):
    """Raised where omega(t) vanishes and the counterdiabatic term is undefined."""

    def __init__(self, message: str, time: float):
        self.time = time
        super().__init__(f"{message} (t = {time:.6g})")


class NormDriftError(NumericalError):
    """Raised when the propagated norm drifts beyond tolerance."""

    def __init__(self, step: int, time: float, norm: float):
        self.step = step
        self.time = time
        self.norm = norm
        super().__init__(f"norm drifted to {norm:.12f} at step {step} (t = {time:.6g})")


class GridEscapeError(NumericalError):
    """Raised when probability reaches the grid boundary during propagation."""

    def __init__(self, time: float, edge_probability: float):
        self.time = time
        self.edge_probability = edge_probability
        super().__init__(
            f"wavefunction reached the grid boundary at t = {time:.6g} "
            f"(edge probability {edge_probability:.3e}); enlarge x_max",
        )
