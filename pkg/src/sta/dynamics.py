"""Split-operator propagation of quadratic Hamiltonians with trajectory observers.

One step of length dt applies, with coefficients frozen at the step midpoint,

    P(dt/2) D(dt/2) K(dt) D(dt/2) P(dt/2)

where P is the x^2 phase, K the p^2 phase in Fourier space and D the dilation generated by
g (xp + px). D is applied exactly through the shear factorization of
:func:`sta.counterdiabatic.dilate`, so only the three pairs fail to commute.
"""

import dataclasses
import logging
import math
import time
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy import fft
from scipy.integrate import quad

from .counterdiabatic import counterdiabatic_invariant, dilate, edge_probability, tt_hamiltonian
from .errors import (
    ErmakovBreakdownError,
    GridEscapeError,
    InvalidInputError,
    NormDriftError,
    PlanError,
    SingularCounterdiabaticError,
)
from .invariant import InvariantSpec, lr_basis, scaling_extent, solve_ermakov_forward
from .models import QuadraticHamiltonian, SpatialGrid, UnitSystem, Wavefunction, check_fock_index
from .oscillator import eigenstate, expectation_values, fock_basis, inner_product
from .protocols import FrequencyProtocol

# Set up logging
logger = logging.getLogger(__name__)

Method = Literal["ii", "tt", "tt-bare", "plain"]
METHODS: Tuple[str, ...] = ("ii", "tt", "tt-bare", "plain")

# dt * max(|omega|, |c|) must not exceed this
STEP_LIMIT = 0.05
DEFAULT_STEPS = 1000
DEFAULT_OBSERVERS = 200
DEFAULT_OBSERVER_N_MAX = 16

# Norm drift that aborts a run
NORM_ABORT = 1e-6

# Probability allowed in the outer 5% of the grid during a run
ESCAPE_PROBABILITY = 1e-8

RATE_SAMPLES = 10_000

# An auto-sized grid holding initial state n resolves at least level 2n + 12
CONTAINED_LEVEL_OFFSET = 12


def fidelity(psi: Wavefunction, target: Wavefunction) -> float:
    """|<target|psi>|^2."""
    return abs(inner_product(target, psi)) ** 2


def _rates(protocol: FrequencyProtocol, method: str, n_samples: int = RATE_SAMPLES) -> np.ndarray:
    """Largest rate among |omega| and |c| at each sample time."""
    times, omega_squared = protocol.sample(n_samples)
    rates = np.sqrt(np.abs(omega_squared))
    if method in ("tt", "tt-bare"):
        bad = np.flatnonzero(omega_squared <= 0)
        if bad.size:
            raise SingularCounterdiabaticError(
                "counterdiabatic driving needs omega^2 > 0 along the whole protocol",
                float(times[bad[0]]),
            )
        coefficient = np.abs(np.asarray(protocol.omega_dot(times)) / (4.0 * np.sqrt(omega_squared)))
        rates = np.maximum(rates, coefficient)
    return rates


def required_steps(protocol: FrequencyProtocol, method: str, limit: float = STEP_LIMIT) -> int:
    """Smallest step count with dt * max(|omega|, |c|) <= limit."""
    rate = float(np.max(_rates(protocol, method)))
    return max(1, math.ceil(protocol.t_f * rate / limit * (1.0 + 1e-12)))


@dataclass(frozen=True, eq=False)
class PropagationPlan:
    """What to propagate and how finely.

    ``invariant`` is the designed invariant of an ``ii`` run; it defaults to the one built from
    the engineered protocol's scaling function.
    """

    method: Method
    protocol: FrequencyProtocol
    grid: SpatialGrid
    n_steps: int = DEFAULT_STEPS
    units: UnitSystem = UnitSystem()
    n_observers: int = DEFAULT_OBSERVERS
    n_max: int = DEFAULT_OBSERVER_N_MAX
    invariant: Optional[InvariantSpec] = None
    step_limit: float = STEP_LIMIT

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise PlanError(f"unknown method {self.method!r}; expected one of {', '.join(METHODS)}")
        if isinstance(self.n_steps, bool) or not isinstance(self.n_steps, int) or self.n_steps < 1:
            raise PlanError(f"n_steps must be a positive integer, got {self.n_steps!r}")
        if isinstance(self.n_observers, bool) or not isinstance(self.n_observers, int) or self.n_observers < 2:
            raise PlanError(f"n_observers must be an integer >= 2, got {self.n_observers!r}")
        check_fock_index(self.n_max)
        if self.method == "ii" and self.invariant is None:
            if self.protocol.kind != "engineered":
                raise PlanError("method 'ii' needs an engineered protocol or an explicit invariant")
            object.__setattr__(self, "invariant", InvariantSpec(self.protocol.scaling, self.protocol.omega0))

        rate = float(np.max(_rates(self.protocol, self.method)))
        if self.dt * rate > self.step_limit:
            needed = required_steps(self.protocol, self.method, self.step_limit)
            raise PlanError(
                f"dt * max rate = {self.dt * rate:.3g} exceeds {self.step_limit:g}; use n_steps >= {needed}",
            )

    @property
    def t_f(self) -> float:
        return self.protocol.t_f

    @property
    def dt(self) -> float:
        return self.protocol.t_f / self.n_steps

    def hamiltonian(self, t: float) -> QuadraticHamiltonian:
        """The Hamiltonian actually applied at time t."""
        if self.method == "tt":
            return tt_hamiltonian(self.protocol, t, self.units, "with_h0")
        if self.method == "tt-bare":
            return tt_hamiltonian(self.protocol, t, self.units, "bare")
        return QuadraticHamiltonian.oscillator(self.protocol.omega_squared(t), self.units)

    def coefficient_table(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(alpha, beta, g) at every step midpoint."""
        midpoints = (np.arange(self.n_steps) + 0.5) * self.dt
        mass = self.units.mass
        omega_squared = np.asarray(self.protocol.omega_squared(midpoints))
        kinetic = np.full(self.n_steps, 1.0 / (2.0 * mass))
        potential = 0.5 * mass * omega_squared
        cross = np.zeros(self.n_steps)
        if self.method in ("tt", "tt-bare"):
            omega = np.sqrt(omega_squared)
            cross = -np.asarray(self.protocol.omega_dot(midpoints)) / (4.0 * omega)
        if self.method == "tt-bare":
            kinetic = np.zeros(self.n_steps)
            potential = np.zeros(self.n_steps)
        return kinetic, potential, cross


@dataclass(frozen=True, eq=False)
class ReferenceFrame:
    """Basis and invariant against which a run is observed.

    ``invariant`` frames use the phase-dressed invariant modes; ``instantaneous`` frames use the
    eigenstates of omega(t), optionally dressed with the adiabatic phases exp(-i(n+1/2) int omega).
    Instantaneous bases do not exist where omega^2 <= 0.
    """

    protocol: FrequencyProtocol
    basis_kind: Literal["invariant", "instantaneous"]
    adiabatic_phases: bool = True
    invariant_spec: Optional[InvariantSpec] = None

    def adiabatic_phase(self, t: float) -> float:
        if t == 0.0:
            return 0.0
        value, _ = quad(lambda s: math.sqrt(max(self.protocol.omega_squared(s), 0.0)), 0.0, t, limit=200)
        return value

    def basis(self, t: float, n_max: int, grid: SpatialGrid, units: UnitSystem) -> Optional[np.ndarray]:
        if self.basis_kind == "invariant":
            return lr_basis(n_max, t, self.invariant_spec, grid, units)
        omega_squared = self.protocol.omega_squared(t)
        if omega_squared <= 0.0:
            return None
        rows = fock_basis(n_max, math.sqrt(omega_squared), grid, units).astype(complex)
        if self.adiabatic_phases:
            theta = self.adiabatic_phase(t)
            rows *= np.exp(-1j * (np.arange(n_max + 1) + 0.5) * theta)[:, None]
        return rows

    def invariant(self, t: float, units: UnitSystem) -> Optional[QuadraticHamiltonian]:
        if self.invariant_spec is not None:
            return self.invariant_spec.hamiltonian(t, units)
        if self.protocol.omega_squared(t) <= 0.0:
            return None
        return counterdiabatic_invariant(self.protocol, t, units)

    def extent(self) -> Tuple[float, float]:
        """(spatial, momentum) frequencies bounding the basis over the run."""
        if self.basis_kind == "invariant":
            extent = scaling_extent(self.invariant_spec.scaling)
            return extent.omega_spatial, extent.omega_momentum
        _, omega_squared = self.protocol.sample(RATE_SAMPLES)
        confining = np.sqrt(omega_squared[omega_squared > 0])
        return float(np.min(confining)), float(np.max(confining))


def frame_for(plan: PropagationPlan) -> ReferenceFrame:
    """Reference frame matching a plan's method."""
    protocol = plan.protocol
    if plan.method == "ii":
        return ReferenceFrame(protocol, "invariant", invariant_spec=plan.invariant)
    if plan.method == "tt":
        return ReferenceFrame(protocol, "instantaneous", adiabatic_phases=True)
    if plan.method == "tt-bare":
        return ReferenceFrame(protocol, "instantaneous", adiabatic_phases=False)
    try:
        spec = InvariantSpec(solve_ermakov_forward(protocol), protocol.omega0)
    except ErmakovBreakdownError as e:
        logger.warning(f"No invariant for the plain ramp: {e}")
        spec = None
    return ReferenceFrame(protocol, "instantaneous", adiabatic_phases=True, invariant_spec=spec)


def run_extent(protocol: FrequencyProtocol, method: str) -> Tuple[float, float]:
    """(spatial, momentum) frequencies bounding the states a run of ``method`` visits.

    Invariant-driven states follow the scaling function of the engineered protocol, plain runs
    the forward Ermakov solution, and every method observed in instantaneous eigenstates also
    needs room for the confining part of omega(t).
    """
    spatial: List[float] = []
    momentum: List[float] = []
    if method != "ii":
        _, omega_squared = protocol.sample(RATE_SAMPLES)
        confining = np.sqrt(omega_squared[omega_squared > 0])
        spatial.append(float(np.min(confining)))
        momentum.append(float(np.max(confining)))
    if method in ("ii", "plain"):
        trajectory = None
        if protocol.kind == "engineered":
            trajectory = protocol.scaling
        else:
            try:
                trajectory = solve_ermakov_forward(protocol)
            except ErmakovBreakdownError as e:
                logger.warning(f"Sizing the grid without the Ermakov solution: {e}")
        if trajectory is not None:
            extent = scaling_extent(trajectory)
            spatial.append(extent.omega_spatial)
            momentum.append(extent.omega_momentum)
    return min(spatial), max(momentum)


def grid_for(
    protocols: Sequence[Tuple[FrequencyProtocol, str]],
    n_max: int,
    units: UnitSystem = UnitSystem(),
    initial_states: Sequence[int] = (),
) -> SpatialGrid:
    """One grid resolving Fock states up to ``n_max`` for every (protocol, method) run.

    An initial state n is also contained: the grid is sized for level 2n + 12 at least, which
    keeps its edge amplitude below the eigenstate boundary tolerance.
    """
    extents = [run_extent(protocol, method) for protocol, method in protocols]
    if not extents:
        raise PlanError("grid sizing needs at least one run")
    n_max = max([check_fock_index(n_max)] + [CONTAINED_LEVEL_OFFSET + 2 * n for n in initial_states])
    omega_spatial = min(e[0] for e in extents)
    omega_momentum = max(e[1] for e in extents)
    grid = SpatialGrid.for_oscillator(n_max, omega_spatial, omega_momentum, units)
    logger.info(
        f"Sized grid x_max={grid.x_max:.6g}, n_points={grid.n_points} for n_max={n_max} "
        f"(omega spatial {omega_spatial:.4g}, momentum {omega_momentum:.4g})",
    )
    return grid


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Observer series of one propagation, one row per observer time.

    ``fidelity`` and ``phase`` compare the state with the initial state carried along by the
    reference frame; ``energy`` is <H0(t)> of the bare trap.
    """

    method: str
    times: np.ndarray
    populations: np.ndarray
    fidelity: np.ndarray
    phase: np.ndarray
    invariant: np.ndarray
    energy: np.ndarray
    norm: np.ndarray
    final: Wavefunction
    n_max: int
    n_steps: int
    wall_time: float
    initial_state: Optional[int] = None

    @property
    def final_fidelity(self) -> float:
        return float(self.fidelity[-1])

    @property
    def final_populations(self) -> np.ndarray:
        return self.populations[-1]

    def max_population_deviation(self, n: Optional[int] = None) -> float:
        """Largest |P_n(t) - P_n(0)| over the run, for one level or all of them."""
        table = self.populations if n is None else self.populations[:, [n]]
        deviation = np.abs(table - table[0])
        return float(np.nanmax(deviation)) if np.any(np.isfinite(deviation)) else math.nan

    def invariant_drift(self) -> float:
        """Largest relative change of <I(t)>."""
        reference = self.invariant[0]
        if not np.isfinite(reference) or reference == 0.0:
            return math.nan
        return float(np.nanmax(np.abs(self.invariant - reference)) / abs(reference))

    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm - 1.0)))


def _support_radius(values: np.ndarray, grid: SpatialGrid) -> float:
    density = np.abs(values) ** 2
    inside = density > 1e-12 * np.max(density)
    return float(np.max(np.abs(grid.x[inside])))


class SplitOperatorPropagator:
    """Strang-split propagator for one plan. Holds per-run FFT phases, so use one per thread."""

    def __init__(self, plan: PropagationPlan):
        self.plan = plan
        self.grid = plan.grid
        self.frame = frame_for(plan)
        self._x_squared = self.grid.x**2
        self._k_squared = self.grid.k**2
        self.n_max = self._observer_n_max()

    def _observer_n_max(self) -> int:
        omega_spatial, omega_momentum = self.frame.extent()
        supported = self.grid.max_fock(omega_spatial, omega_momentum, self.plan.units)
        if supported < 0:
            raise PlanError("grid cannot resolve the ground state of the reference frame; enlarge the grid")
        if supported < self.plan.n_max:
            logger.warning(f"Observer basis clipped from n_max={self.plan.n_max} to {supported} for this grid")
            return supported
        return self.plan.n_max

    def _observer_steps(self) -> np.ndarray:
        steps = np.round(np.linspace(0, self.plan.n_steps, self.plan.n_observers)).astype(int)
        return np.unique(steps)

    def _check_extent(self, values: np.ndarray) -> None:
        if self.frame.basis_kind != "invariant":
            return
        stretch = scaling_extent(self.frame.invariant_spec.scaling).max_b
        reach = stretch * _support_radius(values, self.grid)
        if reach > self.grid.x_max:
            logger.warning(
                f"Scaling function stretches the state to |x| ~ {reach:.3g} beyond x_max = {self.grid.x_max:.3g}",
            )

    def step(self, values: np.ndarray, kinetic: float, potential: float, cross: float) -> np.ndarray:
        """One Strang step with frozen coefficients."""
        dt = self.plan.dt
        hbar = self.plan.units.hbar
        half_potential = np.exp(-0.5j * potential * self._x_squared * dt / hbar)
        values = values * half_potential
        if cross:
            values = dilate(values, self.grid, -cross * dt)
        if kinetic:
            values = fft.ifft(np.exp(-1j * kinetic * hbar * self._k_squared * dt) * fft.fft(values))
        if cross:
            values = dilate(values, self.grid, -cross * dt)
        return values * half_potential

    def _observe(self, values: np.ndarray, t: float, initial: np.ndarray) -> Tuple[np.ndarray, float, float, float, float]:
        units = self.plan.units
        dx = self.grid.dx
        basis = self.frame.basis(t, self.n_max, self.grid, units)
        if basis is None:
            populations = np.full(self.n_max + 1, math.nan)
            fidelity_value = phase = math.nan
        else:
            amplitudes = (np.conj(basis) @ values) * dx
            populations = np.abs(amplitudes) ** 2
            carried = np.vdot(initial, amplitudes)
            fidelity_value = abs(carried) ** 2 / float(np.sum(np.abs(initial) ** 2))
            phase = float(np.angle(carried))
        invariant = self.frame.invariant(t, units)
        invariant_value = math.nan if invariant is None else expectation_values(values, self.grid, invariant, units)
        energy = expectation_values(
            values,
            self.grid,
            QuadraticHamiltonian.oscillator(self.plan.protocol.omega_squared(t), units),
            units,
        )
        return populations, fidelity_value, phase, invariant_value, energy

    def run(self, psi0: Wavefunction) -> TrajectoryRecord:
        """Propagate ``psi0`` over [0, t_f] and record the observers."""
        if psi0.grid != self.grid:
            raise PlanError("initial state and plan use different grids")
        plan = self.plan
        started = time.perf_counter()
        kinetic, potential, cross = plan.coefficient_table()
        observer_steps = self._observer_steps()
        dt = plan.dt
        dx = self.grid.dx

        values = np.array(psi0.amplitudes, dtype=complex)
        self._check_extent(values)
        basis0 = self.frame.basis(0.0, self.n_max, self.grid, plan.units)
        initial = (np.conj(basis0) @ values) * dx

        rows: List[Tuple] = []
        norms: List[float] = []
        next_observer = 0
        logger.info(f"Propagating method={plan.method} over t_f={plan.t_f:g} in {plan.n_steps} steps")
        for step_index in range(plan.n_steps + 1):
            if step_index == observer_steps[next_observer]:
                t = step_index * dt
                norm = float(np.sum(np.abs(values) ** 2) * dx)
                if abs(norm - 1.0) > NORM_ABORT:
                    raise NormDriftError(step_index, t, norm)
                escaped = edge_probability(values, self.grid)
                if escaped > ESCAPE_PROBABILITY:
                    raise GridEscapeError(t, escaped)
                rows.append(self._observe(values, t, initial))
                norms.append(norm)
                next_observer += 1
            if step_index == plan.n_steps:
                break
            values = self.step(values, kinetic[step_index], potential[step_index], cross[step_index])

        elapsed = time.perf_counter() - started
        times = observer_steps * dt
        record = TrajectoryRecord(
            method=plan.method,
            times=times,
            populations=np.array([row[0] for row in rows]),
            fidelity=np.array([row[1] for row in rows]),
            phase=np.array([row[2] for row in rows]),
            invariant=np.array([row[3] for row in rows]),
            energy=np.array([row[4] for row in rows]),
            norm=np.array(norms),
            final=Wavefunction.normalized(self.grid, values),
            n_max=self.n_max,
            n_steps=plan.n_steps,
            wall_time=elapsed,
        )
        logger.debug(
            f"Finished method={plan.method}: final fidelity {record.final_fidelity:.10f}, "
            f"norm drift {record.norm_drift():.2e}, {elapsed:.2f}s",
        )
        return record


def propagate(psi0: Wavefunction, plan: PropagationPlan) -> TrajectoryRecord:
    """Propagate ``psi0`` under ``plan``."""
    return SplitOperatorPropagator(plan).run(psi0)


def adiabatic_reference(
    omega0: float,
    omegaf: float,
    kappa: float,
    t_f: float,
    grid: SpatialGrid,
    units: UnitSystem = UnitSystem(),
    n: int = 0,
    n_steps: Optional[int] = None,
    n_observers: int = DEFAULT_OBSERVERS,
    n_max: int = 8,
) -> TrajectoryRecord:
    """Plain H0 along a linear ramp stretched to kappa * t_f.

    At kappa = 1 a fast ramp excites the oscillator; for large kappa the ramp becomes adiabatic.
    """
    if not (math.isfinite(kappa) and kappa >= 1.0):
        raise InvalidInputError(f"slowdown factor must be >= 1, got {kappa}")
    duration = kappa * t_f
    if omegaf == omega0:
        protocol = FrequencyProtocol.constant(omega0, duration)
    else:
        protocol = FrequencyProtocol.linear_ramp(omega0, omegaf, duration)
    steps = n_steps if n_steps is not None else max(DEFAULT_STEPS, required_steps(protocol, "plain"))
    plan = PropagationPlan(
        method="plain",
        protocol=protocol,
        grid=grid,
        n_steps=steps,
        units=units,
        n_observers=n_observers,
        n_max=n_max,
    )
    record = propagate(eigenstate(n, omega0, grid, units), plan)
    return dataclasses.replace(record, initial_state=n)


@dataclass(frozen=True)
class ConvergenceStudy:
    """Final-state errors against a fine reference for increasing step counts."""

    step_counts: Tuple[int, ...]
    errors: Tuple[float, ...]
    reference_steps: int

    @property
    def ratios(self) -> Tuple[float, ...]:
        return tuple(a / b for a, b in zip(self.errors, self.errors[1:]))

    def to_dict(self) -> dict:
        return {
            "step_counts": list(self.step_counts),
            "errors": list(self.errors),
            "ratios": list(self.ratios),
            "reference_steps": self.reference_steps,
        }


def convergence_study(
    psi0: Wavefunction,
    plan: PropagationPlan,
    factors: Sequence[int] = (1, 2),
    reference_factor: int = 8,
) -> ConvergenceStudy:
    """Measure the splitting order by refining ``plan.n_steps``."""

    def final_state(n_steps: int) -> np.ndarray:
        refined = dataclasses.replace(plan, n_steps=n_steps, n_observers=2)
        return propagate(psi0, refined).final.amplitudes

    reference_steps = plan.n_steps * reference_factor
    reference = final_state(reference_steps)
    step_counts = tuple(plan.n_steps * factor for factor in factors)
    errors = tuple(
        float(np.sqrt(np.sum(np.abs(final_state(n) - reference) ** 2) * plan.grid.dx)) for n in step_counts
    )
    logger.info(f"Convergence: steps {step_counts}, errors {errors}")
    return ConvergenceStudy(step_counts=step_counts, errors=errors, reference_steps=reference_steps)
