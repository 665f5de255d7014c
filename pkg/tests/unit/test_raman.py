"""Tests for the Raman parameter chain and the feasibility diagnostics."""

import logging
import math

import numpy as np
import pytest

from sta.errors import InvalidInputError, ProtocolError, ZeroDetuningError
from sta.invariant import design_quintic, invert_ermakov
from sta.models import UnitSystem
from sta.raman import (
    RamanParams,
    adiabaticity_diagnostic,
    effective_params,
    lamb_dicke_parameter,
    second_sideband_coupling,
    tt_mismatch_report,
)
from sta.protocols import FrequencyProtocol

from .conftest import RAMAN_BLOCK


@pytest.fixture
def raw():
    return RamanParams(**RAMAN_BLOCK)


@pytest.fixture
def eff(raw):
    return effective_params(raw)


def test_effective_parameters(eff):
    assert eff.omegaL == 11.0
    assert eff.Delta == 1.0
    assert eff.delta == 2.0
    assert eff.x0 == pytest.approx(math.sqrt(0.5))
    assert eff.eta == pytest.approx(math.sqrt(2.0))
    assert eff.phi == pytest.approx(-math.pi / 2)
    assert eff.Omega == pytest.approx(0.5)
    assert eff.stark == pytest.approx(0.5)
    assert eff.to_dict()["half_Omega"] == pytest.approx(0.25)


def test_sideband_coupling(eff):
    coupling = second_sideband_coupling(eff)
    assert coupling.coefficient == pytest.approx(0.25)
    assert coupling.resonance_ok
    assert coupling.phase_ok
    assert coupling.resonance_error == 0.0


def test_weak_coupling_with_small_lamb_dicke_parameter():
    raw = RamanParams(
        Omega1=1.0, Omega2=1.0, omega1=11.0, omega2=10.0, phi1=0.0, phi2=math.pi / 2,
        k1=0.05, k2=-0.05, omega_e=9.5, omega=0.5,
    )
    eff = effective_params(raw)
    assert eff.eta == pytest.approx(0.1)
    coupling = second_sideband_coupling(eff)
    assert coupling.coefficient == pytest.approx(0.00125)
    assert coupling.resonance_ok


def test_copropagating_beams_do_not_couple():
    eff = effective_params(RamanParams(**{**RAMAN_BLOCK, "k2": 1.0}))
    assert eff.eta == 0.0
    assert second_sideband_coupling(eff).coefficient == 0.0


def test_off_resonance_and_wrong_phase_are_flagged():
    eff = effective_params(RamanParams(**{**RAMAN_BLOCK, "omega1": 11.0, "omega2": 11.0, "omega_e": 10.0, "phi2": 0.0}))
    coupling = second_sideband_coupling(eff)
    assert eff.delta == 0.0
    assert not coupling.resonance_ok
    assert coupling.resonance_error == pytest.approx(2.0)
    assert not coupling.phase_ok


def test_phase_is_compared_modulo_two_pi():
    eff = effective_params(RamanParams(**{**RAMAN_BLOCK, "phi1": 2 * math.pi}))
    assert second_sideband_coupling(eff).phase_ok


def test_zero_detuning():
    with pytest.raises(ZeroDetuningError):
        effective_params(RamanParams(**{**RAMAN_BLOCK, "omega1": 11.0, "omega2": 9.0}))


def test_small_detuning_is_warned(raw, caplog):
    with caplog.at_level(logging.WARNING, logger="sta.raman"):
        eff = effective_params(raw)
    assert eff.validity_ratio == pytest.approx(1.0)
    assert "effective two-photon description" in caplog.text


def test_raman_params_validation():
    with pytest.raises(InvalidInputError):
        RamanParams(**{**RAMAN_BLOCK, "Omega1": -1.0})
    with pytest.raises(InvalidInputError):
        RamanParams(**{**RAMAN_BLOCK, "k1": math.nan})


def test_lamb_dicke_parameter(units):
    omegas = np.geomspace(0.01, 100.0, 100)
    values = np.array([lamb_dicke_parameter(1.0, omega, 1.0, units) for omega in omegas])
    assert np.allclose(values, 1.0 / np.sqrt(2.0 * omegas), rtol=1e-14)


def test_effective_lamb_dicke_parameters_per_beam():
    units = UnitSystem(hbar=4.0)
    raw = RamanParams(**{**RAMAN_BLOCK, "k1": 0.3, "k2": -0.2, "omega": 4.0, "mass": 0.5})
    eff = effective_params(raw, units)
    assert eff.x0 == lamb_dicke_parameter(1.0, 4.0, 0.5, units) == pytest.approx(1.0)
    assert eff.eta1 == lamb_dicke_parameter(0.3, 4.0, 0.5, units)
    assert eff.eta2 == lamb_dicke_parameter(-0.2, 4.0, 0.5, units)
    assert eff.eta == pytest.approx(0.5)


def test_adiabaticity_of_linear_ramp(fast_ramp):
    diagnostic = adiabaticity_diagnostic(fast_ramp)
    assert diagnostic.applicable
    assert diagnostic.max_value == pytest.approx(90.0)
    assert diagnostic.argmax_time == pytest.approx(1.0)

    slow = adiabaticity_diagnostic(FrequencyProtocol.linear_ramp(1.0, 0.1, 1e4))
    assert slow.max_value == pytest.approx(0.009)


def test_adiabaticity_through_expulsive_interval(fast_design):
    diagnostic = adiabaticity_diagnostic(fast_design)
    assert not diagnostic.applicable
    assert math.isnan(diagnostic.max_value)
    with pytest.raises(ProtocolError):
        adiabaticity_diagnostic(fast_design, strict=True)


def test_ramp_cannot_be_tracked(fast_ramp, eff):
    report = tt_mismatch_report(fast_ramp, eff)
    assert report.available == pytest.approx(0.25)
    assert report.required[0] == pytest.approx(0.225)
    assert report.required[-1] == pytest.approx(2.25)
    assert report.cannot_track
    assert report.summary()["max_required"] == pytest.approx(2.25)
    assert report.matched_times.size > 0
    assert np.all(np.abs(fast_ramp.omega_dot(report.matched_times) / (4 * fast_ramp.omega(report.matched_times))) < 0.26)


def test_constant_trap_needs_no_coupling(eff):
    report = tt_mismatch_report(FrequencyProtocol.constant(1.0, 5.0), eff)
    assert not report.cannot_track
    assert np.all(report.required == 0.0)
    assert np.all(report.mismatch == -1.0)
    assert report.matched_times.size == 0
    assert report.summary()["adiabaticity"]["max_value"] == 0.0


def test_expulsive_protocol_cannot_be_tracked(fast_design, eff):
    report = tt_mismatch_report(fast_design, eff)
    assert report.cannot_track
    assert np.any(np.isnan(report.required))


def test_sideband_coefficient_is_quadratic_in_eta_and_linear_in_rabi_frequency():
    strengths = np.linspace(0.1, 1.0, 10)
    rabi = np.linspace(0.1, 1.0, 10)
    scaled = []
    for k in strengths:
        for Omega1 in rabi:
            eff = effective_params(RamanParams(**{**RAMAN_BLOCK, "k1": k, "k2": -k, "Omega1": Omega1}))
            coefficient = second_sideband_coupling(eff).coefficient
            assert coefficient == pytest.approx(eff.eta**2 * eff.Omega / 4.0, rel=1e-14)
            scaled.append(coefficient / (k**2 * Omega1))
    assert np.allclose(scaled, scaled[0], rtol=1e-12)


@pytest.mark.parametrize("stretch", [0.1, 3.0, 20.0])
def test_adiabaticity_is_unchanged_by_rescaling_time(stretch):
    ramp = FrequencyProtocol.linear_ramp(1.0, 0.1, 1.0)
    rescaled = FrequencyProtocol.linear_ramp(1.0 / stretch, 0.1 / stretch, stretch)
    assert adiabaticity_diagnostic(rescaled).max_value == pytest.approx(
        adiabaticity_diagnostic(ramp).max_value, rel=1e-9
    )

    design = invert_ermakov(design_quintic(1.0, 0.1, 10.0))
    rescaled = invert_ermakov(design_quintic(1.0 / stretch, 0.1 / stretch, 10.0 * stretch))
    assert adiabaticity_diagnostic(rescaled).max_value == pytest.approx(
        adiabaticity_diagnostic(design).max_value, rel=1e-9
    )
