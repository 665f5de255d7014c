"""Transitionless tracking: the counterdiabatic term and the squeezing operator.

For a trap omega(t) the correction H1 = -(omega'/4 omega)(xp + px) makes the instantaneous
eigenstates exact solutions. H1 at different times commute, so the bare evolution is a
squeeze S(r) with r = ln sqrt(omega(t)/omega(0)).
"""

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import fft

from .errors import GridTooNarrowError, InvalidInputError, SingularCounterdiabaticError
from .models import QuadraticHamiltonian, SpatialGrid, UnitSystem, Wavefunction
from .oscillator import ladder_matrices
from .protocols import FrequencyProtocol

# Set up logging
logger = logging.getLogger(__name__)

PhaseChoice = Literal["with_h0", "bare"]

# Largest |r| applied in one shear factorization
MAX_SQUEEZE_STEP = 0.05

# Probability allowed in the outer 5% of the grid after a squeeze
EDGE_PROBABILITY = 1e-8
EDGE_FRACTION = 0.95


@dataclass(frozen=True)
class CounterdiabaticTerm:
    """H1(t) = -c(t)(xp + px) with c = omega'/(4 omega)."""

    coefficient: float
    time: float

    def hamiltonian(self) -> QuadraticHamiltonian:
        return QuadraticHamiltonian(kinetic=0.0, potential=0.0, cross=-self.coefficient)


@dataclass(frozen=True)
class SqueezeParameter:
    """Real squeeze parameter r of S(r) = exp{(r/2)(a^2 - a_dag^2)}."""

    r: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.r):
            raise InvalidInputError(f"squeeze parameter must be finite, got {self.r}")


def _real_frequency(protocol: FrequencyProtocol, t: float) -> float:
    omega_squared = protocol.omega_squared(t)
    if omega_squared <= 0.0:
        raise SingularCounterdiabaticError(
            f"counterdiabatic term undefined: omega^2 = {omega_squared:.6g} is not positive",
            t,
        )
    return math.sqrt(omega_squared)


def h1_term(protocol: FrequencyProtocol, t: float) -> CounterdiabaticTerm:
    """Counterdiabatic coefficient c(t) = omega'(t) / (4 omega(t)).

    Raises
    ------
        SingularCounterdiabaticError: Where omega(t) vanishes or is imaginary

    """
    omega = _real_frequency(protocol, t)
    return CounterdiabaticTerm(coefficient=protocol.omega_dot(t) / (4.0 * omega), time=t)


def squeeze_parameter(protocol: FrequencyProtocol, t: float) -> SqueezeParameter:
    """r(t) = ln sqrt(omega(t)/omega(0))."""
    omega_squared = protocol.omega_squared(t)
    if omega_squared <= 0.0:
        raise InvalidInputError(f"squeeze parameter needs a positive frequency; omega^2({t:g}) = {omega_squared:.6g}")
    return SqueezeParameter(r=0.25 * math.log(omega_squared / protocol.omega0**2))


def tt_hamiltonian(
    protocol: FrequencyProtocol,
    t: float,
    units: UnitSystem,
    phase_choice: PhaseChoice = "with_h0",
) -> QuadraticHamiltonian:
    """Transitionless-tracking Hamiltonian H0 + H1, or H1 alone for ``bare``."""
    term = h1_term(protocol, t)
    if phase_choice == "bare":
        return term.hamiltonian()
    if phase_choice != "with_h0":
        raise InvalidInputError(f"unknown phase choice {phase_choice!r}")
    return QuadraticHamiltonian(
        kinetic=1.0 / (2.0 * units.mass),
        potential=0.5 * units.mass * protocol.omega_squared(t),
        cross=-term.coefficient,
    )


def counterdiabatic_invariant(protocol: FrequencyProtocol, t: float, units: UnitSystem) -> QuadraticHamiltonian:
    """(omega0/omega(t)) H0(t), an invariant of both H0 + H1 and the bare H1."""
    omega = _real_frequency(protocol, t)
    ratio = protocol.omega0 / omega
    return QuadraticHamiltonian(
        kinetic=ratio / (2.0 * units.mass),
        potential=0.5 * ratio * units.mass * omega**2,
        cross=0.0,
    )


def h1_fock_matrix(term: CounterdiabaticTerm, size: int, units: UnitSystem) -> np.ndarray:
    """i hbar c (a^2 - a_dag^2) in a truncated Fock basis of ``size`` levels."""
    a, a_dag = ladder_matrices(size)
    return 1j * units.hbar * term.coefficient * (a @ a - a_dag @ a_dag)


def _free_phase(values: np.ndarray, k_squared: np.ndarray, s: float) -> np.ndarray:
    return fft.ifft(np.exp(-0.5j * s * k_squared) * fft.fft(values))


def dilate(values: np.ndarray, grid: SpatialGrid, r: float) -> np.ndarray:
    """e^{r/2} psi(e^r x) on the periodic grid.

    The dilation diag(e^-r, e^r) of phase space is factored into two free-evolution phases in
    Fourier space and two quadratic chirps in position space; every factor is an exact unitary
    multiplication, so the result stays normalized to machine precision. Large |r| is split
    into steps of at most MAX_SQUEEZE_STEP.
    """
    if r == 0.0:
        return np.array(values, dtype=complex)
    n_sub = max(1, math.ceil(abs(r) / MAX_SQUEEZE_STEP))
    step = r / n_sub
    expm1 = math.expm1(step)
    scale = math.sqrt(abs(expm1)) * grid.k_max / grid.x_max
    x_squared = grid.x**2
    k_squared = grid.k**2
    s_first = -expm1 / scale
    s_second = -math.expm1(-step) / scale
    chirp_first = np.exp(-0.5j * scale * x_squared)
    chirp_second = np.exp(0.5j * scale * math.exp(step) * x_squared)
    result = np.asarray(values, dtype=complex)
    for _ in range(n_sub):
        result = _free_phase(result, k_squared, s_first) * chirp_first
        result = _free_phase(result, k_squared, s_second) * chirp_second
    return result


def edge_probability(values: np.ndarray, grid: SpatialGrid) -> float:
    """Probability in the outer 5% of the grid."""
    outer = np.abs(grid.x) > EDGE_FRACTION * grid.x_max
    return float(np.sum(np.abs(values[outer]) ** 2) * grid.dx)


def apply_squeeze(r: SqueezeParameter, psi: Wavefunction) -> Wavefunction:
    """(S psi)(x) = e^{r/2} psi(e^r x).

    Raises
    ------
        GridTooNarrowError: If the rescaled state reaches the grid boundary

    """
    values = dilate(psi.amplitudes, psi.grid, r.r)
    edge = edge_probability(values, psi.grid)
    if edge > EDGE_PROBABILITY:
        raise GridTooNarrowError(f"squeezed state leaves the grid (edge probability {edge:.2e}); enlarge x_max")
    return Wavefunction.normalized(psi.grid, values)
