"""Two-photon Raman parameter chain and the feasibility of counterdiabatic driving in ion traps.

Far-detuned lasers (|Delta| >> Omega_j, omega) couple the vibrational levels through an effective
two-photon interaction. Tuned to the second blue sideband with phase -pi/2 it reduces to
i hbar (eta^2 Omega / 4)(a^2 - a_dag^2), the operator form of the counterdiabatic term but
with a constant prefactor.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict

import numpy as np

from .errors import InvalidInputError, ProtocolError, ZeroDetuningError
from .models import UnitSystem
from .protocols import FrequencyProtocol

# Set up logging
logger = logging.getLogger(__name__)

VALIDITY_THRESHOLD = 20.0
RESONANCE_TOLERANCE = 1e-6
PHASE_TOLERANCE = 1e-6

DIAGNOSTIC_SAMPLES = 10_001
MISMATCH_SAMPLES = 1001

# Relative change of the required coefficient within one trap period that a static coupling cannot follow
TRACKING_VARIATION = 0.1


@dataclass(frozen=True)
class RamanParams:
    """Laboratory parameters of a two-laser Raman configuration and the trap."""

    Omega1: float
    Omega2: float
    omega1: float
    omega2: float
    phi1: float
    phi2: float
    k1: float
    k2: float
    omega_e: float
    omega: float
    mass: float = 1.0

    def __post_init__(self) -> None:
        for name in ("Omega1", "Omega2", "omega1", "omega2", "omega_e", "omega", "mass"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive, got {value}")
        for name in ("phi1", "phi2", "k1", "k2"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInputError(f"{name} must be finite")

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def lamb_dicke_parameter(k: float, omega: float, mass: float, units: UnitSystem) -> float:
    """eta = k x0 with x0 = sqrt(hbar / (2 m omega))."""
    return k * math.sqrt(units.hbar / (2.0 * mass * omega))


@dataclass(frozen=True)
class EffectiveRamanParams:
    """Effective two-photon quantities derived from :class:`RamanParams`."""

    delta: float
    eta: float
    phi: float
    Omega: float
    stark: float
    Delta: float
    omegaL: float
    x0: float
    eta1: float
    eta2: float
    omega: float
    validity_ratio: float

    def to_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data["half_Omega"] = self.Omega / 2.0
        return data


def effective_params(
    raw: RamanParams,
    units: UnitSystem = UnitSystem(),
    validity_threshold: float = VALIDITY_THRESHOLD,
) -> EffectiveRamanParams:
    """Effective Raman parameters (the tilde quantities).

    Raises
    ------
        ZeroDetuningError: If the mean laser frequency equals the transition frequency

    """
    omegaL = (raw.omega1 + raw.omega2) / 2.0
    Delta = omegaL - raw.omega_e
    if Delta == 0.0:
        raise ZeroDetuningError("Raman detuning vanishes: (omega1 + omega2)/2 equals omega_e")
    x0 = lamb_dicke_parameter(1.0, raw.omega, raw.mass, units)
    eta1 = lamb_dicke_parameter(raw.k1, raw.omega, raw.mass, units)
    eta2 = lamb_dicke_parameter(raw.k2, raw.omega, raw.mass, units)
    ratio = abs(Delta) / max(raw.Omega1, raw.Omega2, raw.omega)
    if ratio < validity_threshold:
        logger.warning(
            f"Detuning |Delta|={abs(Delta):.4g} is only {ratio:.3g}x max(Omega_j, omega); "
            f"the effective two-photon description needs >> 1 (threshold {validity_threshold:g})",
        )
    return EffectiveRamanParams(
        delta=raw.omega1 - raw.omega2,
        eta=eta1 - eta2,
        phi=raw.phi1 - raw.phi2,
        Omega=raw.Omega1 * raw.Omega2 / (2.0 * Delta),
        stark=(raw.Omega1**2 + raw.Omega2**2) / (4.0 * Delta),
        Delta=Delta,
        omegaL=omegaL,
        x0=x0,
        eta1=eta1,
        eta2=eta2,
        omega=raw.omega,
        validity_ratio=ratio,
    )


@dataclass(frozen=True)
class SidebandCoupling:
    """Second-blue-sideband coupling i hbar coefficient (a^2 - a_dag^2) and its conditions."""

    coefficient: float
    resonance_ok: bool
    phase_ok: bool
    resonance_error: float
    phase_error: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def second_sideband_coupling(
    eff: EffectiveRamanParams,
    resonance_tolerance: float = RESONANCE_TOLERANCE,
    phase_tolerance: float = PHASE_TOLERANCE,
) -> SidebandCoupling:
    """Coefficient eta^2 Omega / 4, with the resonance delta = 2 omega and the phase -pi/2 checked."""
    resonance_error = abs(eff.delta - 2.0 * eff.omega)
    phase_error = abs(math.remainder(eff.phi + math.pi / 2.0, 2.0 * math.pi))
    return SidebandCoupling(
        coefficient=eff.eta**2 * eff.Omega / 4.0,
        resonance_ok=resonance_error < resonance_tolerance * eff.omega,
        phase_ok=phase_error < phase_tolerance,
        resonance_error=resonance_error,
        phase_error=phase_error,
    )


@dataclass(frozen=True)
class AdiabaticityDiagnostic:
    """max |omega'| / omega^2 over the protocol; not applicable through expulsive intervals."""

    max_value: float
    argmax_time: float
    applicable: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def adiabaticity_diagnostic(
    protocol: FrequencyProtocol,
    n_samples: int = DIAGNOSTIC_SAMPLES,
    strict: bool = False,
) -> AdiabaticityDiagnostic:
    """Dense maximum of the adiabaticity rate |omega'|/omega^2.

    Raises
    ------
        ProtocolError: With ``strict`` when omega^2 <= 0 somewhere on the protocol

    """
    times, omega_squared = protocol.sample(n_samples)
    if np.any(omega_squared <= 0):
        message = "adiabaticity diagnostic undefined: omega^2 <= 0 on part of the protocol"
        if strict:
            raise ProtocolError(message)
        logger.warning(message)
        return AdiabaticityDiagnostic(max_value=math.nan, argmax_time=math.nan, applicable=False)
    rates = np.abs(np.asarray(protocol.omega_dot(times))) / omega_squared
    index = int(np.argmax(rates))
    return AdiabaticityDiagnostic(max_value=float(rates[index]), argmax_time=float(times[index]))


@dataclass(frozen=True, eq=False)
class MismatchReport:
    """Required counterdiabatic coefficient versus the static sideband coupling."""

    times: np.ndarray
    required: np.ndarray
    available: float
    mismatch: np.ndarray
    period_variation: np.ndarray
    cannot_track: bool
    diagnostic: AdiabaticityDiagnostic

    @property
    def matched_times(self) -> np.ndarray:
        """Sample times where the static coupling is within 1% of the requirement."""
        return self.times[np.abs(self.mismatch) <= 0.01]

    def summary(self) -> Dict[str, Any]:
        return {
            "available": self.available,
            "max_required": float(np.nanmax(self.required)),
            "max_period_variation": float(np.nanmax(self.period_variation)),
            "cannot_track": self.cannot_track,
            "adiabaticity": self.diagnostic.to_dict(),
        }


def tt_mismatch_report(
    protocol: FrequencyProtocol,
    eff: EffectiveRamanParams,
    n_samples: int = MISMATCH_SAMPLES,
) -> MismatchReport:
    """Compare |omega'/(4 omega)| along the protocol with eta^2 Omega / 4.

    ``cannot_track`` is raised when the required coefficient changes by more than 10% within
    one trap period 2 pi / omega(t) anywhere, or where no real frequency exists.
    """
    available = abs(second_sideband_coupling(eff).coefficient)
    times, omega_squared = protocol.sample(n_samples)
    confining = omega_squared > 0
    omega = np.sqrt(np.where(confining, omega_squared, np.nan))
    required = np.full(times.shape, np.nan)
    required[confining] = np.abs(np.asarray(protocol.omega_dot(times[confining])) / (4.0 * omega[confining]))

    if available > 0:
        mismatch = required / available - 1.0
    else:
        mismatch = np.where(required == 0.0, 0.0, np.inf)

    variation = np.full(times.shape, np.nan)
    for i in np.flatnonzero(confining):
        end = np.searchsorted(times, times[i] + 2.0 * math.pi / omega[i], side="right")
        window = required[i:end]
        window = window[np.isfinite(window)]
        peak = np.max(window)
        variation[i] = 0.0 if peak == 0.0 else (peak - np.min(window)) / peak

    cannot_track = bool(not np.all(confining) or np.nanmax(variation) > TRACKING_VARIATION)
    diagnostic = adiabaticity_diagnostic(protocol)
    if cannot_track:
        logger.info("A static sideband coupling cannot follow the required counterdiabatic coefficient")
    return MismatchReport(
        times=times,
        required=required,
        available=available,
        mismatch=mismatch,
        period_variation=variation,
        cannot_track=cannot_track,
        diagnostic=diagnostic,
    )
