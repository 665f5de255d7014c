"""Tests for quintic design, the Ermakov equation and Lewis-Riesenfeld modes."""

import math

import numpy as np
import pytest

from sta.errors import InvalidInputError
from sta.invariant import (
    InvariantSpec,
    design_quintic,
    detect_expulsive,
    ermakov_energy,
    invariant_expectation,
    invert_ermakov,
    lr_basis,
    lr_mode,
    quintic_from_boundary,
    scaling_extent,
    solve_ermakov_forward,
)
from sta.models import QuadraticHamiltonian, Wavefunction
from sta.oscillator import eigenstate, inner_product, quadratic_expectation
from sta.protocols import FrequencyProtocol, ScalingFunction


def test_identity_design():
    scaling = design_quintic(1.0, 1.0, 2.0)
    times = np.linspace(0.0, 2.0, 50)
    assert np.all(scaling.b(times) == 1.0)
    assert scaling.gamma == 1.0


def test_design_midpoint():
    scaling = design_quintic(1.0, 0.25, 1.0)
    assert scaling.gamma == pytest.approx(2.0)
    assert scaling.b(0.5) == pytest.approx(1.5)


@pytest.mark.parametrize("omega0, omegaf, t_f", [(1.0, 0.1, 1.0), (2.0, 0.5, 3.0), (1.0, 4.0, 0.5)])
def test_design_boundary_conditions(omega0, omegaf, t_f):
    scaling = design_quintic(omega0, omegaf, t_f)
    assert scaling.b(0.0) == pytest.approx(1.0)
    assert scaling.b(t_f) == pytest.approx(math.sqrt(omega0 / omegaf), rel=1e-12)
    for t in (0.0, t_f):
        assert scaling.b_dot(t) == pytest.approx(0.0, abs=1e-12)
        assert scaling.b_ddot(t) == pytest.approx(0.0, abs=1e-10)


def test_design_rejects_nonpositive_input():
    with pytest.raises(InvalidInputError):
        design_quintic(1.0, 0.0, 1.0)


def test_boundary_solve_matches_closed_form():
    general = quintic_from_boundary(1.5, (1.0, 0.0, 0.0), (2.0, 0.0, 0.0), omega0=1.0)
    closed = design_quintic(1.0, 0.25, 1.5)
    assert np.allclose(general.coefficients, closed.coefficients, atol=1e-12)


def test_boundary_solve_nonzero_slope():
    scaling = quintic_from_boundary(2.0, (1.0, 1.0, 0.0), (1.5, 0.0, 0.0), omega0=1.0)
    assert scaling.b_dot(0.0) == pytest.approx(1.0, rel=1e-12)
    assert scaling.b(2.0) == pytest.approx(1.5, rel=1e-12)


def test_invert_constant_scaling():
    protocol = invert_ermakov(design_quintic(1.3, 1.3, 1.0))
    times = np.linspace(0.0, 1.0, 20)
    assert np.allclose(protocol.omega_squared(times), 1.69, rtol=1e-14)


def test_forward_solution_at_fixed_point():
    solution = solve_ermakov_forward(FrequencyProtocol.constant(1.0, 5.0))
    times = np.linspace(0.0, 5.0, 101)
    assert np.max(np.abs(solution.b(times) - 1.0)) < 1e-12


def test_forward_solution_oscillates_between_turning_points():
    protocol = FrequencyProtocol.constant(1.0, 10.0)
    solution = solve_ermakov_forward(protocol, b0=2.0)
    times = np.linspace(0.0, 10.0, 20001)
    b = solution.b(times)
    energy = ermakov_energy(solution, times)
    assert np.max(np.abs(energy - 4.25)) < 1e-8
    assert np.min(b) == pytest.approx(0.5, abs=1e-4)
    assert np.max(b) == pytest.approx(2.0, abs=1e-7)


def test_forward_solution_rejects_nonpositive_start():
    with pytest.raises(InvalidInputError):
        solve_ermakov_forward(FrequencyProtocol.constant(1.0, 1.0), b0=0.0)


@pytest.mark.parametrize("gamma", [0.5, 2.0, 10.0])
def test_ermakov_round_trip(gamma):
    scaling = design_quintic(1.0, 1.0 / gamma**2, 2.0)
    solution = solve_ermakov_forward(invert_ermakov(scaling))
    times = np.linspace(0.0, 2.0, 2001)
    error = np.max(np.abs(solution.sample(times) - scaling.b(times)))
    assert error < 1e-8 * gamma


def test_invariant_needs_matching_start():
    scaling = ScalingFunction(coefficients=(1.0, 0.5, 0.0, 0.0, 0.0, 0.0), t_f=1.0, omega0=1.0)
    with pytest.raises(InvalidInputError):
        InvariantSpec(scaling, 1.0)
    with pytest.raises(InvalidInputError):
        InvariantSpec(design_quintic(1.0, 0.5, 1.0), 2.0)


def test_invariant_equals_hamiltonian_at_start(units):
    spec = InvariantSpec(design_quintic(1.0, 0.1, 1.0), 1.0)
    assert spec.hamiltonian(0.0, units) == QuadraticHamiltonian.oscillator(1.0, units)


def test_lr_mode_at_start_is_eigenstate(grid, units):
    spec = InvariantSpec(design_quintic(1.0, 0.1, 1.0), 1.0)
    for n in range(4):
        mode = lr_mode(n, 0.0, spec, grid, units)
        assert np.allclose(mode.amplitudes, eigenstate(n, 1.0, grid, units).amplitudes, atol=1e-13)


def test_lr_mode_at_end_matches_final_eigenstate(grid, units):
    spec = InvariantSpec(design_quintic(1.0, 0.1, 1.0), 1.0)
    for n in range(4):
        mode = lr_mode(n, 1.0, spec, grid, units)
        target = eigenstate(n, 0.1, grid, units)
        assert np.allclose(np.abs(mode.amplitudes), np.abs(target.amplitudes), atol=1e-10)
        assert abs(inner_product(target, mode)) == pytest.approx(1.0, abs=1e-10)


def test_lr_modes_orthonormal_mid_run(grid, units):
    spec = InvariantSpec(design_quintic(1.0, 0.1, 1.0), 1.0)
    basis = lr_basis(5, 0.4, spec, grid, units)
    gram = np.conj(basis) @ basis.T * grid.dx
    assert np.allclose(gram, np.eye(6), atol=1e-10)


@pytest.mark.parametrize("t", [0.0, 0.3, 0.6, 1.0])
def test_invariant_eigenvalues_constant(t, grid, units):
    spec = InvariantSpec(design_quintic(1.0, 0.1, 1.0), 1.0)
    for n in range(3):
        mode = lr_mode(n, t, spec, grid, units)
        assert invariant_expectation(mode, spec, t, units) == pytest.approx(n + 0.5, rel=1e-9)


def test_identity_invariant_equals_energy(grid, units):
    spec = InvariantSpec(design_quintic(1.0, 1.0, 1.0), 1.0)
    values = eigenstate(0, 1.0, grid, units).amplitudes + 0.5j * eigenstate(3, 1.0, grid, units).amplitudes
    psi = Wavefunction.normalized(grid, values)
    h0 = QuadraticHamiltonian.oscillator(1.0, units)
    assert invariant_expectation(psi, spec, 0.4, units) == pytest.approx(quadratic_expectation(psi, h0, units))


def test_phase_of_identity_invariant():
    spec = InvariantSpec(design_quintic(2.0, 2.0, 3.0), 2.0)
    assert spec.phase(1.5) == pytest.approx(3.0, rel=1e-12)


def test_no_expulsive_interval_for_simple_kinds():
    assert detect_expulsive(FrequencyProtocol.constant(1.0, 1.0)) == []
    assert detect_expulsive(FrequencyProtocol.linear_ramp(1.0, 0.1, 0.1)) == []


def test_fast_design_has_expulsive_interval():
    protocol = invert_ermakov(design_quintic(1.0, 0.1, 0.1))
    intervals = detect_expulsive(protocol)
    assert intervals
    assert protocol.min_omega_squared() < 0
    for start, end in intervals:
        assert 0.0 <= start < end <= 0.1
        assert protocol.omega_squared(0.5 * (start + end)) < 0
        assert protocol.omega_squared(start) == pytest.approx(0.0, abs=1e-3)


def test_slow_design_has_no_expulsive_interval():
    assert detect_expulsive(invert_ermakov(design_quintic(1.0, 0.1, 100.0))) == []


def test_scaling_extent(fast_design):
    extent = scaling_extent(fast_design.scaling)
    assert extent.min_b == pytest.approx(1.0)
    assert extent.max_b == pytest.approx(math.sqrt(10.0), rel=1e-6)
    assert extent.omega_spatial == pytest.approx(0.1, rel=1e-5)
    assert extent.omega_momentum > 1.0
