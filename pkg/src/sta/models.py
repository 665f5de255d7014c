"""Data models shared by the oscillator, invariant and propagation modules."""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from .errors import FockIndexError, GridError, InvalidInputError, NormalizationError

# Tolerance on sum |psi|^2 dx for objects that claim to be normalized
NORM_TOLERANCE = 1e-10

# Smallest grid the toolkit accepts
MIN_GRID_POINTS = 64

FockIndex = int


def check_fock_index(n: Any) -> FockIndex:
    """Validate a Fock index and return it as a plain int.

    Raises
    ------
        FockIndexError: If ``n`` is not a nonnegative integer

    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
        raise FockIndexError(f"Fock index must be a nonnegative integer, got {n!r}")
    return int(n)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class UnitSystem:
    """Action and mass scales. The defaults give dimensionless units."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise InvalidInputError(f"hbar must be positive, got {self.hbar}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise InvalidInputError(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on [-x_max, x_max) with a power-of-two number of points."""

    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_max) and self.x_max > 0):
            raise GridError(f"x_max must be positive, got {self.x_max}")
        n = self.n_points
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise GridError(f"n_points must be an integer, got {n!r}")
        if n < MIN_GRID_POINTS or n & (n - 1):
            raise GridError(f"n_points must be a power of two >= {MIN_GRID_POINTS}, got {n}")

    @property
    def x_min(self) -> float:
        return -self.x_max

    @property
    def dx(self) -> float:
        return 2.0 * self.x_max / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return _readonly(self.x_min + self.dx * np.arange(self.n_points))

    @cached_property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return _readonly(2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx))

    @property
    def k_max(self) -> float:
        return math.pi / self.dx

    def momenta(self, units: UnitSystem) -> np.ndarray:
        """Momentum values hbar*k in FFT order."""
        return units.hbar * self.k

    def max_fock(self, omega_spatial: float, omega_momentum: float, units: UnitSystem, factor: float = 1.5) -> int:
        """Largest Fock index the grid resolves for the given width and momentum frequencies.

        A state n needs ``factor * sqrt((2n+1) hbar / (m omega_spatial))`` of room in x and
        ``factor * sqrt((2n+1) hbar m omega_momentum)`` below the momentum cutoff.
        Returns -1 when not even the ground state fits.
        """
        hbar, mass = units.hbar, units.mass
        spatial = (self.x_max / factor) ** 2 * mass * omega_spatial / hbar
        momentum = (hbar * self.k_max / factor) ** 2 / (hbar * mass * omega_momentum)
        return int(math.floor((min(spatial, momentum) - 1.0) / 2.0 + 1e-9))

    @classmethod
    def for_oscillator(
        cls,
        n_max: int,
        omega_min: float,
        omega_max: float,
        units: UnitSystem,
        factor: float = 1.5,
    ) -> "SpatialGrid":
        """Size a grid for Fock states up to ``n_max`` over a frequency range.

        x_max = factor * sqrt((2 n_max + 1) hbar / (m omega_min)); the point count is the
        smallest power of two whose momentum cutoff covers
        factor * sqrt((2 n_max + 1) hbar m omega_max).
        """
        if omega_min <= 0 or omega_max <= 0:
            raise GridError("grid sizing needs positive frequencies")
        quanta = 2 * check_fock_index(n_max) + 1
        x_max = factor * math.sqrt(quanta * units.hbar / (units.mass * omega_min))
        p_needed = factor * math.sqrt(quanta * units.hbar * units.mass * omega_max)
        dx = math.pi * units.hbar / p_needed
        n_points = MIN_GRID_POINTS
        while 2.0 * x_max / n_points > dx:
            n_points *= 2
        return cls(x_max=x_max, n_points=n_points)

    def to_dict(self) -> dict:
        return {"x_max": self.x_max, "n_points": self.n_points}


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """Complex amplitudes on a grid, normalized so that sum |psi|^2 dx = 1."""

    grid: SpatialGrid
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.amplitudes, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise GridError(
                f"amplitudes must have shape ({self.grid.n_points},), got {values.shape}",
            )
        object.__setattr__(self, "amplitudes", _readonly(values))
        norm = self.norm()
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NormalizationError(f"wavefunction norm is {norm:.15f}, expected 1")

    @classmethod
    def normalized(cls, grid: SpatialGrid, values: np.ndarray) -> "Wavefunction":
        """Build a wavefunction from unnormalized samples."""
        values = np.asarray(values, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(values) ** 2)) * grid.dx)
        if norm == 0.0 or not math.isfinite(norm):
            raise NormalizationError("cannot normalize a zero or non-finite wavefunction")
        return cls(grid, values / norm)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """H = alpha p^2 + beta x^2 + g (x p + p x) at one instant.

    alpha is 1/(2m) for ordinary oscillators and zero for the bare counterdiabatic term;
    beta may be negative (expulsive parabola).
    """

    kinetic: float
    potential: float
    cross: float

    def __post_init__(self) -> None:
        for name in ("kinetic", "potential", "cross"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} coefficient must be finite")
        if self.kinetic < 0:
            raise InvalidInputError(f"kinetic coefficient must be nonnegative, got {self.kinetic}")

    @classmethod
    def oscillator(cls, omega_squared: float, units: UnitSystem) -> "QuadraticHamiltonian":
        """Plain oscillator p^2/2m + m omega^2 x^2/2."""
        return cls(
            kinetic=1.0 / (2.0 * units.mass),
            potential=0.5 * units.mass * omega_squared,
            cross=0.0,
        )

    def to_dict(self) -> dict:
        return {"kinetic": self.kinetic, "potential": self.potential, "cross": self.cross}
