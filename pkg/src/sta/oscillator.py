"""Harmonic-oscillator eigenstates, grid inner products and quadratic expectations."""

import logging
import math
from typing import Tuple

import numpy as np
from scipy import fft

from .errors import FockIndexError, GridMismatchError, GridTooNarrowError, InvalidInputError
from .models import (
    FockIndex,
    QuadraticHamiltonian,
    SpatialGrid,
    UnitSystem,
    Wavefunction,
    check_fock_index,
)

# Set up logging
logger = logging.getLogger(__name__)

# Eigenstates must have decayed below this amplitude at the grid edges
BOUNDARY_AMPLITUDE = 1e-12

DEFAULT_N_MAX = 64


def hermite_functions(n_max: int, xi: np.ndarray) -> np.ndarray:
    """Normalized Hermite functions h_0..h_{n_max} at the points ``xi``.

    Uses the upward recurrence
    h_{k+1} = sqrt(2/(k+1)) xi h_k - sqrt(k/(k+1)) h_{k-1}, which keeps every row
    normalized and never forms H_n(xi) or n! explicitly.

    Returns
    -------
        np.ndarray: Array of shape (n_max + 1, len(xi)) with integral h_n^2 dxi = 1

    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((n_max + 1,) + xi.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi**2)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(1, n_max):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * xi * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def _check_frequency(omega: float) -> None:
    if not (math.isfinite(omega) and omega > 0):
        raise InvalidInputError(f"oscillator frequency must be positive, got {omega}")


def fock_basis(n_max: int, omega: float, grid: SpatialGrid, units: UnitSystem) -> np.ndarray:
    """Eigenstates |0>..|n_max> of frequency ``omega`` sampled on the grid (rows)."""
    _check_frequency(omega)
    scale = math.sqrt(units.mass * omega / units.hbar)
    return scale**0.5 * hermite_functions(n_max, scale * grid.x)


def eigenstate(n: FockIndex, omega: float, grid: SpatialGrid, units: UnitSystem) -> Wavefunction:
    """Oscillator eigenstate <x|n> for frequency ``omega``.

    Raises
    ------
        GridTooNarrowError: If the state has not decayed at the grid boundary
        FockIndexError: If the grid cannot resolve level ``n``

    """
    n = check_fock_index(n)
    values = fock_basis(n, omega, grid, units)[n]
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > BOUNDARY_AMPLITUDE:
        raise GridTooNarrowError(
            f"eigenstate n={n} at omega={omega:g} has amplitude {edge:.2e} at the grid edge "
            f"(x_max={grid.x_max:g})",
        )
    supported = grid.max_fock(omega, omega, units)
    if n > supported:
        raise FockIndexError(f"grid supports n <= {supported} at omega={omega:g}, requested n={n}")
    return Wavefunction.normalized(grid, values)


def _check_same_grid(bra: Wavefunction, ket: Wavefunction) -> None:
    if bra.grid != ket.grid:
        raise GridMismatchError(f"wavefunctions live on different grids: {bra.grid} vs {ket.grid}")


def inner_product(bra: Wavefunction, ket: Wavefunction) -> complex:
    """<bra|ket> by rectangle quadrature (spectrally accurate on the periodic grid)."""
    _check_same_grid(bra, ket)
    return complex(np.vdot(bra.amplitudes, ket.amplitudes) * bra.grid.dx)


def overlaps(basis: np.ndarray, psi: Wavefunction) -> np.ndarray:
    """<basis_n|psi> for every row of ``basis``."""
    return (np.conj(basis) @ psi.amplitudes) * psi.grid.dx


def populations(
    psi: Wavefunction,
    omega: float,
    n_max: int = DEFAULT_N_MAX,
    units: UnitSystem = UnitSystem(),
) -> np.ndarray:
    """P_n = |<n(omega)|psi>|^2 for n = 0..n_max.

    Raises the same errors as :func:`eigenstate` for the highest requested level.
    """
    n_max = check_fock_index(n_max)
    eigenstate(n_max, omega, psi.grid, units)
    basis = fock_basis(n_max, omega, psi.grid, units)
    return np.abs(overlaps(basis, psi)) ** 2


def dt_matrix_element(k: FockIndex, n: FockIndex, omega: float, omega_dot: float) -> float:
    """<k|d_t n> for oscillator eigenstates with time-dependent frequency."""
    k = check_fock_index(k)
    n = check_fock_index(n)
    _check_frequency(omega)
    rate = omega_dot / omega
    if k == n - 2:
        return 0.25 * math.sqrt(n * (n - 1)) * rate
    if k == n + 2:
        return -0.25 * math.sqrt((n + 1) * (n + 2)) * rate
    return 0.0


def apply_momentum(values: np.ndarray, grid: SpatialGrid, units: UnitSystem) -> np.ndarray:
    """p psi by spectral differentiation."""
    return fft.ifft(grid.momenta(units) * fft.fft(values))


def apply_quadratic(psi: Wavefunction, hamiltonian: QuadraticHamiltonian, units: UnitSystem) -> np.ndarray:
    """H|psi> on the grid for H = alpha p^2 + beta x^2 + g (xp + px)."""
    x = psi.grid.x
    values = psi.amplitudes
    p_psi = apply_momentum(values, psi.grid, units)
    result = hamiltonian.potential * x**2 * values
    if hamiltonian.kinetic:
        result = result + hamiltonian.kinetic * apply_momentum(p_psi, psi.grid, units)
    if hamiltonian.cross:
        result = result + hamiltonian.cross * (x * p_psi + apply_momentum(x * values, psi.grid, units))
    return result


def quadratic_expectation(psi: Wavefunction, hamiltonian: QuadraticHamiltonian, units: UnitSystem) -> float:
    """<psi|H|psi> for a quadratic Hamiltonian.

    Each term is evaluated in a manifestly real form: <p^2> = ||p psi||^2,
    <x^2> = ||x psi||^2 and <xp + px> = 2 Re <x psi|p psi>.
    """
    return expectation_values(psi.amplitudes, psi.grid, hamiltonian, units)


def expectation_values(
    values: np.ndarray,
    grid: SpatialGrid,
    hamiltonian: QuadraticHamiltonian,
    units: UnitSystem,
) -> float:
    """Same as :func:`quadratic_expectation` for raw grid amplitudes."""
    dx = grid.dx
    x_psi = grid.x * values
    p_psi = apply_momentum(values, grid, units)
    p2 = float(np.vdot(p_psi, p_psi).real) * dx
    x2 = float(np.vdot(x_psi, x_psi).real) * dx
    xp = 2.0 * float(np.vdot(x_psi, p_psi).real) * dx
    return hamiltonian.kinetic * p2 + hamiltonian.potential * x2 + hamiltonian.cross * xp


def ladder_matrices(size: int) -> Tuple[np.ndarray, np.ndarray]:
    """Truncated annihilation and creation matrices in a Fock basis of ``size`` levels."""
    lower = np.diag(np.sqrt(np.arange(1, size, dtype=float)), k=1)
    return lower.astype(complex), lower.T.astype(complex)


def quadratic_fock_matrix(
    hamiltonian: QuadraticHamiltonian,
    omega: float,
    size: int,
    units: UnitSystem,
) -> np.ndarray:
    """Matrix of a quadratic Hamiltonian in the eigenbasis of frequency ``omega``.

    Built from exact ladder identities so that truncation only removes levels and
    never corrupts the retained block.
    """
    _check_frequency(omega)
    a, a_dag = ladder_matrices(size)
    hbar, mass = units.hbar, units.mass
    a2 = a @ a
    a_dag2 = a_dag @ a_dag
    number = a_dag @ a
    identity = np.eye(size)
    x2 = hbar / (2.0 * mass * omega) * (a2 + a_dag2 + 2.0 * number + identity)
    p2 = hbar * mass * omega / 2.0 * (-a2 - a_dag2 + 2.0 * number + identity)
    xp_px = 1j * hbar * (a_dag2 - a2)
    return hamiltonian.kinetic * p2 + hamiltonian.potential * x2 + hamiltonian.cross * xp_px
