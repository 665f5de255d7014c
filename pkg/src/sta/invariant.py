"""Inverse engineering with Lewis-Riesenfeld invariants.

A scaling function b(t) that satisfies the boundary conditions is chosen first; the trap
frequency then follows from the Ermakov equation b'' + omega(t)^2 b = omega0^2 / b^3. The
invariant eigenmodes, dressed with their phases, solve the Schrodinger equation for that
omega(t) with constant amplitudes.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .errors import ErmakovBreakdownError, GridTooNarrowError, InvalidInputError, ScalingFunctionError
from .models import FockIndex, QuadraticHamiltonian, SpatialGrid, UnitSystem, Wavefunction, check_fock_index
from .oscillator import BOUNDARY_AMPLITUDE, hermite_functions, quadratic_expectation
from .protocols import FrequencyProtocol, ScalingFunction, TimeLike, checked_times, scalar_or_array

# Set up logging
logger = logging.getLogger(__name__)

ERMAKOV_RTOL = 1e-10
ERMAKOV_ATOL = 1e-12

# Quadrature tolerance for the invariant phase
PHASE_TOLERANCE = 1e-12

EXPULSIVE_SAMPLES = 10_000

# Fraction of b0 below which the forward solution is declared collapsed
COLLAPSE_FRACTION = 1e-8


class ScalingTrajectory(Protocol):
    """Anything that provides b(t) and its first two derivatives on [0, t_f]."""

    t_f: float
    omega0: float

    def b(self, t: TimeLike) -> TimeLike: ...

    def b_dot(self, t: TimeLike) -> TimeLike: ...

    def b_ddot(self, t: TimeLike) -> TimeLike: ...


def quintic_from_boundary(
    t_f: float,
    start: Sequence[float],
    end: Sequence[float],
    omega0: float,
) -> ScalingFunction:
    """Quintic matching (b, b', b'') at t = 0 and t = t_f.

    Args:
        t_f (float): Duration
        start (Sequence[float]): b(0), b'(0), b''(0)
        end (Sequence[float]): b(t_f), b'(t_f), b''(t_f)
        omega0 (float): Reference frequency of the invariant

    Returns:
        ScalingFunction: The unique quintic through the six conditions

    """
    if not (t_f > 0 and omega0 > 0):
        raise InvalidInputError("t_f and omega0 must be positive")
    matrix = np.zeros((6, 6))
    rhs = np.zeros(6)
    powers = np.arange(6)
    for offset, (s, values) in enumerate(((0.0, start), (1.0, end))):
        for order in range(3):
            row = 3 * offset + order
            factor = np.ones(6)
            for k in range(order):
                factor *= powers - k
            exponent = np.maximum(powers - order, 0)
            matrix[row] = np.where(powers >= order, factor * s**exponent, 0.0)
            # Conditions are in t; the polynomial variable is s = t/t_f
            rhs[row] = values[order] * t_f**order
    coefficients = np.linalg.solve(matrix, rhs)
    return ScalingFunction(coefficients=tuple(coefficients), t_f=t_f, omega0=omega0)


def design_quintic(omega0: float, omegaf: float, t_f: float) -> ScalingFunction:
    """Quintic b(t) taking the trap from omega0 to omegaf in t_f without final excitations.

    b = 1 + (gamma - 1)(10 s^3 - 15 s^4 + 6 s^5), s = t/t_f, gamma = sqrt(omega0/omegaf),
    so b(0) = 1, b(t_f) = gamma and b', b'' vanish at both ends.
    """
    for name, value in (("omega0", omega0), ("omegaf", omegaf), ("t_f", t_f)):
        if not (math.isfinite(value) and value > 0):
            raise InvalidInputError(f"{name} must be positive, got {value}")
    gamma = math.sqrt(omega0 / omegaf)
    delta = gamma - 1.0
    coefficients = (1.0, 0.0, 0.0, 10.0 * delta, -15.0 * delta, 6.0 * delta)
    logger.debug(f"Designed quintic: gamma={gamma:.12g}, t_f={t_f:g}")
    return ScalingFunction(coefficients=coefficients, t_f=t_f, omega0=omega0)


def invert_ermakov(scaling: ScalingFunction) -> FrequencyProtocol:
    """Engineered protocol omega^2 = omega0^2/b^4 - b''/b.

    Raises
    ------
        ScalingFunctionError: If b vanishes on [0, t_f]

    """
    _, values = _sample_b(scaling, EXPULSIVE_SAMPLES)
    if np.min(values) <= 0:
        raise ScalingFunctionError("b(t) vanishes on [0, t_f]; the Ermakov inversion is undefined")
    return FrequencyProtocol.engineered(scaling)


def _sample_b(trajectory: ScalingTrajectory, n_samples: int) -> Tuple[np.ndarray, np.ndarray]:
    times = np.linspace(0.0, trajectory.t_f, n_samples)
    return times, np.asarray(trajectory.b(times))


@dataclass(frozen=True, eq=False)
class ErmakovSolution:
    """Dense numerical solution of the Ermakov equation for a given protocol.

    Serves as a scaling trajectory: b'' is recovered from the equation itself.
    """

    protocol: FrequencyProtocol
    b0: float
    bdot0: float
    solution: object
    n_evaluations: int

    @property
    def t_f(self) -> float:
        return self.protocol.t_f

    @property
    def omega0(self) -> float:
        return self.protocol.omega0

    def _state(self, t: TimeLike) -> np.ndarray:
        times = checked_times(t, self.t_f)
        return np.asarray(self.solution(times))

    def b(self, t: TimeLike) -> TimeLike:
        return scalar_or_array(self._state(t)[0], t)

    def b_dot(self, t: TimeLike) -> TimeLike:
        return scalar_or_array(self._state(t)[1], t)

    def b_ddot(self, t: TimeLike) -> TimeLike:
        b = np.asarray(self.b(t))
        values = -np.asarray(self.protocol.omega_squared(t)) * b + self.omega0**2 / b**3
        return scalar_or_array(values, t)

    def sample(self, times: Sequence[float]) -> np.ndarray:
        """b at the requested times."""
        return np.asarray(self.b(np.asarray(times, dtype=float)))


def solve_ermakov_forward(protocol: FrequencyProtocol, b0: float = 1.0, bdot0: float = 0.0) -> ErmakovSolution:
    """Integrate b'' + omega(t)^2 b = omega0^2/b^3 over [0, t_f].

    Uses an adaptive eighth-order Runge-Kutta scheme (rtol 1e-10) with dense output and a
    terminal event for the collapse b -> 0.

    Raises
    ------
        InvalidInputError: If b0 is not positive
        ErmakovBreakdownError: If the solver fails or b collapses, with the time of breakdown

    """
    if not (math.isfinite(b0) and b0 > 0):
        raise InvalidInputError(f"b0 must be positive, got {b0}")
    omega0_sq = protocol.omega0**2
    floor = COLLAPSE_FRACTION * b0

    def rhs(t, y):
        return [y[1], -protocol.omega_squared(t) * y[0] + omega0_sq / y[0] ** 3]

    def collapse(t, y):
        return y[0] - floor

    collapse.terminal = True
    collapse.direction = -1

    result = solve_ivp(
        rhs,
        (0.0, protocol.t_f),
        [b0, bdot0],
        method="DOP853",
        rtol=ERMAKOV_RTOL,
        atol=ERMAKOV_ATOL,
        dense_output=True,
        events=collapse,
    )
    if result.status == -1:
        raise ErmakovBreakdownError(f"Ermakov integration failed: {result.message}", float(result.t[-1]))
    if result.t_events[0].size:
        raise ErmakovBreakdownError("scaling function collapsed to zero", float(result.t_events[0][0]))
    logger.debug(f"Ermakov solve: {result.nfev} evaluations, {result.t.size} steps")
    return ErmakovSolution(protocol=protocol, b0=b0, bdot0=bdot0, solution=result.sol, n_evaluations=result.nfev)


def ermakov_energy(solution: ErmakovSolution, t: TimeLike) -> TimeLike:
    """b'^2 + omega^2 b^2 + omega0^2/b^2, conserved while omega is constant."""
    b = np.asarray(solution.b(t))
    b_dot = np.asarray(solution.b_dot(t))
    values = b_dot**2 + np.asarray(solution.protocol.omega_squared(t)) * b**2 + solution.omega0**2 / b**2
    return scalar_or_array(values, t)


@dataclass(frozen=True, eq=False)
class InvariantSpec:
    """Lewis-Riesenfeld invariant I(t) = (x^2 m omega0^2 / b^2 + pi^2 / m) / 2, pi = b p - m b' x."""

    scaling: ScalingTrajectory
    omega0: float

    def __post_init__(self) -> None:
        if self.omega0 != self.scaling.omega0:
            raise InvalidInputError("invariant omega0 must equal the scaling function's omega0")
        start = (self.scaling.b(0.0) - 1.0, self.scaling.b_dot(0.0), self.scaling.b_ddot(0.0))
        if max(abs(value) for value in start) > 1e-9:
            raise InvalidInputError("the invariant needs b(0) = 1, b'(0) = 0 and b''(0) = 0 so that I(0) = H0(0)")

    @property
    def t_f(self) -> float:
        return self.scaling.t_f

    def hamiltonian(self, t: float, units: UnitSystem) -> QuadraticHamiltonian:
        """I(t) expanded as alpha p^2 + beta x^2 + g (xp + px)."""
        b = float(self.scaling.b(t))
        b_dot = float(self.scaling.b_dot(t))
        mass = units.mass
        return QuadraticHamiltonian(
            kinetic=b**2 / (2.0 * mass),
            potential=mass * self.omega0**2 / (2.0 * b**2) + mass * b_dot**2 / 2.0,
            cross=-b * b_dot / 2.0,
        )

    def phase(self, t: float) -> float:
        """Integral of omega0 / b^2 from 0 to t."""
        if t == 0.0:
            return 0.0
        value, _ = quad(
            lambda s: self.omega0 / float(self.scaling.b(s)) ** 2,
            0.0,
            t,
            epsabs=PHASE_TOLERANCE,
            epsrel=PHASE_TOLERANCE,
            limit=200,
        )
        return value


def lr_basis(n_max: int, t: float, spec: InvariantSpec, grid: SpatialGrid, units: UnitSystem) -> np.ndarray:
    """Invariant modes Psi_0..Psi_{n_max} at time t, one per row, with their phases."""
    n_max = check_fock_index(n_max)
    b = float(spec.scaling.b(t))
    b_dot = float(spec.scaling.b_dot(t))
    hbar, mass = units.hbar, units.mass
    scale = math.sqrt(mass * spec.omega0 / hbar)
    x = grid.x
    envelope = (scale / b) ** 0.5 * hermite_functions(n_max, scale * x / b)
    chirp = np.exp(1j * mass * b_dot * x**2 / (2.0 * hbar * b))
    theta = spec.phase(t)
    phases = np.exp(-1j * (np.arange(n_max + 1) + 0.5) * theta)
    return phases[:, None] * envelope * chirp[None, :]


def lr_mode(n: FockIndex, t: float, spec: InvariantSpec, grid: SpatialGrid, units: UnitSystem) -> Wavefunction:
    """Invariant eigenmode Psi_n(t, x) including the Lewis-Riesenfeld phase.

    Raises
    ------
        GridTooNarrowError: If the mode has not decayed at the grid boundary

    """
    n = check_fock_index(n)
    values = lr_basis(n, t, spec, grid, units)[n]
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > BOUNDARY_AMPLITUDE:
        raise GridTooNarrowError(f"invariant mode n={n} at t={t:g} has amplitude {edge:.2e} at the grid edge")
    return Wavefunction.normalized(grid, values)


def invariant_expectation(psi: Wavefunction, spec: InvariantSpec, t: float, units: UnitSystem) -> float:
    """<psi|I(t)|psi>."""
    return quadratic_expectation(psi, spec.hamiltonian(t, units), units)


def detect_expulsive(protocol: FrequencyProtocol, n_samples: int = EXPULSIVE_SAMPLES) -> List[Tuple[float, float]]:
    """Maximal intervals where omega^2(t) < 0.

    Sign changes on a dense sample are refined with Brent's method to 1e-9 t_f.
    """
    if protocol.kind in ("constant", "linear-ramp"):
        return []
    times, values = protocol.sample(n_samples)
    negative = values < 0
    if not np.any(negative):
        return []

    xtol = 1e-9 * protocol.t_f

    def crossing(i: int) -> float:
        return brentq(protocol.omega_squared, times[i], times[i + 1], xtol=xtol)

    intervals: List[Tuple[float, float]] = []
    start: Optional[float] = 0.0 if negative[0] else None
    for i in range(len(times) - 1):
        if not negative[i] and negative[i + 1]:
            start = crossing(i)
        elif negative[i] and not negative[i + 1]:
            intervals.append((start, crossing(i)))
            start = None
    if start is not None:
        intervals.append((start, protocol.t_f))
    logger.info(f"Found {len(intervals)} expulsive interval(s), min omega^2 = {np.min(values):.6g}")
    return intervals


@dataclass(frozen=True)
class ScalingExtent:
    """Extremes of a scaling trajectory that decide the grid size."""

    min_b: float
    max_b: float
    max_b_dot: float
    omega_spatial: float
    omega_momentum: float

    def to_dict(self) -> dict:
        return {
            "min_b": self.min_b,
            "max_b": self.max_b,
            "max_b_dot": self.max_b_dot,
            "omega_spatial": self.omega_spatial,
            "omega_momentum": self.omega_momentum,
        }


def scaling_extent(trajectory: ScalingTrajectory, n_samples: int = EXPULSIVE_SAMPLES) -> ScalingExtent:
    """Widest spatial and momentum extent reached by the invariant modes.

    A mode of width b behaves spatially like an eigenstate of frequency omega0/b^2 and, because
    of its chirp, in momentum like one of frequency omega0/b^2 + b'^2/omega0.
    """
    times, b = _sample_b(trajectory, n_samples)
    b_dot = np.asarray(trajectory.b_dot(times))
    omega0 = trajectory.omega0
    return ScalingExtent(
        min_b=float(np.min(b)),
        max_b=float(np.max(b)),
        max_b_dot=float(np.max(np.abs(b_dot))),
        omega_spatial=float(omega0 / np.max(b) ** 2),
        omega_momentum=float(np.max(omega0 / b**2 + b_dot**2 / omega0)),
    )
