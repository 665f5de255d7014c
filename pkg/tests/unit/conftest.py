"""Shared fixtures for the unit tests."""

import json
from typing import Any, Dict

import pytest

from runner.protocol_file import ProtocolFile, loads
from sta.invariant import design_quintic, invert_ermakov
from sta.models import SpatialGrid, UnitSystem
from sta.protocols import FrequencyProtocol


@pytest.fixture
def units():
    return UnitSystem()


@pytest.fixture
def grid():
    """Wide grid used for the fast 1 -> 0.1 expansion."""
    return SpatialGrid(40.0, 1024)


@pytest.fixture
def fast_ramp():
    return FrequencyProtocol.linear_ramp(1.0, 0.1, 1.0)


@pytest.fixture
def fast_design():
    return invert_ermakov(design_quintic(1.0, 0.1, 1.0))


def protocol_data(**overrides: Any) -> Dict[str, Any]:
    """A valid protocol file as a dictionary, with top-level overrides."""
    data: Dict[str, Any] = {
        "version": 1,
        "method": "ii",
        "omega0": 1.0,
        "omegaf": 0.1,
        "t_f": 1.0,
        "grid": {"x_max": 40.0, "n_points": 1024},
        "propagation": {"n_steps": 2000, "n_observers": 50, "n_max": 4},
        "initial_states": [0, 1],
    }
    data.update(overrides)
    return data


def make_protocol_file(**overrides: Any) -> ProtocolFile:
    return loads(json.dumps(protocol_data(**overrides)))


RAMAN_BLOCK = {
    "Omega1": 1.0,
    "Omega2": 1.0,
    "omega1": 12.0,
    "omega2": 10.0,
    "phi1": 0.0,
    "phi2": 1.5707963267948966,
    "k1": 1.0,
    "k2": -1.0,
    "omega_e": 10.0,
    "omega": 1.0,
}
