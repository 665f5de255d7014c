"""Tests for split-operator propagation and its observers."""

import math

import numpy as np
import pytest

from sta.counterdiabatic import apply_squeeze, squeeze_parameter
from sta.dynamics import (
    PropagationPlan,
    adiabatic_reference,
    convergence_study,
    fidelity,
    frame_for,
    grid_for,
    propagate,
    required_steps,
    run_extent,
)
from sta.errors import InvalidInputError, PlanError, SingularCounterdiabaticError
from sta.invariant import InvariantSpec, design_quintic, invert_ermakov, lr_mode
from sta.models import SpatialGrid
from sta.oscillator import eigenstate
from sta.protocols import FrequencyProtocol


def test_fidelity_between_eigenstates(grid, units):
    ground = eigenstate(0, 1.0, grid, units)
    assert fidelity(ground, ground) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(eigenstate(1, 1.0, grid, units), ground) == pytest.approx(0.0, abs=1e-12)
    assert fidelity(eigenstate(0, 4.0, grid, units), ground) == pytest.approx(0.8, abs=1e-10)


def test_stationary_state_stays_put(grid, units):
    protocol = FrequencyProtocol.constant(1.0, 2.0)
    plan = PropagationPlan("plain", protocol, grid, n_steps=2000, n_observers=21, n_max=4)
    record = propagate(eigenstate(1, 1.0, grid, units), plan)

    assert record.times.shape == (21,)
    assert record.times[-1] == pytest.approx(2.0)
    assert record.final_fidelity == pytest.approx(1.0, abs=1e-8)
    assert abs(record.phase[-1]) < 1e-4
    assert record.max_population_deviation() < 1e-8
    assert np.allclose(record.energy, 1.5, atol=1e-6)
    assert record.norm_drift() < 1e-10
    assert record.invariant_drift() < 1e-6


def test_plan_rejects_coarse_steps(grid, fast_ramp):
    with pytest.raises(PlanError, match="n_steps >="):
        PropagationPlan("plain", fast_ramp, grid, n_steps=10)
    PropagationPlan("plain", fast_ramp, grid, n_steps=required_steps(fast_ramp, "plain"))


def test_required_steps_grow_with_counterdiabatic_rate(fast_ramp):
    assert required_steps(fast_ramp, "tt") > required_steps(fast_ramp, "plain")


def test_plan_validation(grid, fast_ramp):
    with pytest.raises(PlanError):
        PropagationPlan("shortcut", fast_ramp, grid)
    with pytest.raises(PlanError):
        PropagationPlan("ii", fast_ramp, grid)
    with pytest.raises(PlanError):
        PropagationPlan("plain", fast_ramp, grid, n_observers=1)


def test_tt_needs_real_frequency(grid, fast_design):
    with pytest.raises(SingularCounterdiabaticError):
        PropagationPlan("tt", fast_design, grid, n_steps=4000)


def test_frames(grid, fast_ramp, fast_design):
    assert frame_for(PropagationPlan("ii", fast_design, grid, n_steps=4000)).basis_kind == "invariant"
    tt_frame = frame_for(PropagationPlan("tt", fast_ramp, grid, n_steps=4000))
    bare_frame = frame_for(PropagationPlan("tt-bare", fast_ramp, grid, n_steps=4000))
    assert tt_frame.basis_kind == bare_frame.basis_kind == "instantaneous"
    assert tt_frame.adiabatic_phases and not bare_frame.adiabatic_phases


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_invariant_based_shortcut(n, grid, units, fast_design):
    plan = PropagationPlan("ii", fast_design, grid, n_steps=10_000, n_observers=200, n_max=4)
    record = propagate(eigenstate(n, 1.0, grid, units), plan)

    assert record.times.shape == (200,)
    assert record.final_fidelity >= 0.9999
    assert fidelity(record.final, eigenstate(n, 0.1, grid, units)) >= 0.9999
    assert record.max_population_deviation() < 1e-6
    assert record.invariant_drift() < 1e-6
    assert np.all(np.isfinite(record.energy))


def test_invariant_modes_follow_the_design(grid, units, fast_design):
    spec = InvariantSpec(fast_design.scaling, 1.0)
    plan = PropagationPlan("ii", fast_design, grid, n_steps=4000, n_observers=11, n_max=2)
    record = propagate(lr_mode(1, 0.0, spec, grid, units), plan)
    midway = lr_mode(1, record.times[5], spec, grid, units)
    assert record.times[5] == pytest.approx(0.5)
    assert record.populations[5, 1] == pytest.approx(1.0, abs=1e-4)
    assert abs(record.phase[-1]) < 1e-2
    assert midway.norm() == pytest.approx(1.0)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_transitionless_tracking(n, grid, units, fast_ramp):
    plan = PropagationPlan("tt", fast_ramp, grid, n_steps=4000, n_observers=200, n_max=6)
    record = propagate(eigenstate(n, 1.0, grid, units), plan)

    assert record.times.shape == (200,)
    assert record.max_population_deviation(n) < 1e-4
    assert abs(record.phase[-1]) < 1e-3
    assert record.final_fidelity >= 1 - 1e-4
    assert fidelity(record.final, eigenstate(n, 0.1, grid, units)) >= 1 - 1e-4


def test_bare_correction_is_a_squeeze(grid, units, fast_ramp):
    plan = PropagationPlan("tt-bare", fast_ramp, grid, n_steps=4000, n_observers=10, n_max=4)
    psi0 = eigenstate(1, 1.0, grid, units)
    record = propagate(psi0, plan)
    expected = apply_squeeze(squeeze_parameter(fast_ramp, 1.0), psi0)
    assert fidelity(record.final, expected) >= 1 - 1e-6
    assert record.max_population_deviation(1) < 1e-4


def test_plain_fast_ramp_excites(grid, units, fast_ramp):
    plan = PropagationPlan("plain", fast_ramp, grid, n_steps=4000, n_observers=50, n_max=8)
    record = propagate(eigenstate(0, 1.0, grid, units), plan)
    assert record.final_fidelity < 0.95
    assert record.final_populations[0] == pytest.approx(record.final_fidelity, abs=1e-10)
    assert np.all(record.final_populations[1::2] < 1e-10)


def test_expulsive_design_on_too_small_grid(grid, units):
    protocol = invert_ermakov(design_quintic(1.0, 0.1, 0.1))
    assert protocol.min_omega_squared() < 0
    plan = PropagationPlan("ii", protocol, grid, n_steps=10000, n_observers=20, n_max=8)
    with pytest.raises(PlanError, match="enlarge the grid"):
        propagate(eigenstate(0, 1.0, grid, units), plan)


def test_initial_state_on_another_grid(grid, units, fast_ramp):
    plan = PropagationPlan("plain", fast_ramp, grid, n_steps=1000)
    with pytest.raises(PlanError):
        propagate(eigenstate(0, 1.0, SpatialGrid(20.0, 512), units), plan)


def test_adiabatic_reference_rejects_speedup():
    with pytest.raises(InvalidInputError):
        adiabatic_reference(1.0, 0.1, 0.5, 1.0, SpatialGrid(25.0, 512))


def test_adiabatic_reference_without_slowdown(grid):
    record = adiabatic_reference(1.0, 0.1, 1.0, 1.0, grid, n_steps=4000, n_observers=20)
    assert record.initial_state == 0
    assert record.final_fidelity < 0.95


@pytest.mark.slow
def test_slow_ramp_is_adiabatic():
    record = adiabatic_reference(1.0, 0.1, 1000.0, 1.0, SpatialGrid(25.0, 512), n_steps=25_000, n_observers=20)
    assert record.times[-1] == pytest.approx(1000.0)
    assert record.final_fidelity >= 0.999


@pytest.mark.slow
def test_splitting_is_second_order(grid, units, fast_design):
    plan = PropagationPlan("ii", fast_design, grid, n_steps=1000)
    study = convergence_study(eigenstate(0, 1.0, grid, units), plan)
    assert study.step_counts == (1000, 2000)
    assert study.reference_steps == 8000
    assert 3.5 <= study.ratios[0] <= 4.5
    assert study.to_dict()["ratios"] == list(study.ratios)


def test_run_extent_of_a_ramp(fast_ramp):
    assert run_extent(fast_ramp, "tt") == pytest.approx((0.1, 1.0))
    spatial, momentum = run_extent(fast_ramp, "plain")
    assert spatial <= 0.1 + 1e-12
    assert momentum >= 1.0


def test_grid_for_expulsive_design(units):
    protocol = invert_ermakov(design_quintic(1.0, 0.1, 0.1))
    grid = grid_for([(protocol, "ii")], 8, units)
    assert grid.x_max == pytest.approx(1.5 * math.sqrt(17 / 0.1))
    assert grid.n_points == 4096


def test_expulsive_design_on_sized_grid(units):
    protocol = invert_ermakov(design_quintic(1.0, 0.1, 0.1))
    grid = grid_for([(protocol, "ii")], 8, units)
    plan = PropagationPlan("ii", protocol, grid, n_steps=10_000, n_observers=20, n_max=8)
    record = propagate(eigenstate(0, 1.0, grid, units), plan)
    assert record.n_max == 8
    assert record.final_fidelity >= 1 - 1e-6
    assert record.invariant_drift() < 1e-6


def test_grid_for_needs_a_run(units):
    with pytest.raises(PlanError):
        grid_for([], 4, units)


def test_grid_for_contains_initial_states(units):
    protocol = FrequencyProtocol.linear_ramp(1.0, 4.0, 1.0)
    grid = grid_for([(protocol, "tt")], 3, units, initial_states=[3])
    assert grid.x_max == pytest.approx(1.5 * math.sqrt(37 / 1.0))
    assert eigenstate(3, 1.0, grid, units).norm() == pytest.approx(1.0)
