"""Trap-frequency protocols omega(t) on [0, t_f] and quintic scaling functions b(t)."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import CubicSpline

from .errors import ProtocolError, ScalingFunctionError

# Set up logging
logger = logging.getLogger(__name__)

ProtocolKind = Literal["constant", "linear-ramp", "engineered", "tabulated"]
PROTOCOL_KINDS: Tuple[str, ...] = ("constant", "linear-ramp", "engineered", "tabulated")

TimeLike = Union[float, np.ndarray]

# Samples used to certify positivity of b(t)
POSITIVITY_SAMPLES = 10_000

# Relative tolerance on omega(0)^2 = omega0^2 and omega(t_f)^2 = omega_f^2
ENDPOINT_TOLERANCE = 1e-9

# Step of the finite-difference frequency derivative, relative to t_f
DIFFERENCE_STEP = 1e-6

_TIME_SLACK = 1e-12


def scalar_or_array(values: np.ndarray, like: TimeLike) -> TimeLike:
    return float(values) if np.ndim(like) == 0 else values


def _check_positive(name: str, value: float) -> float:
    if not (isinstance(value, (int, float, np.integer, np.floating)) and math.isfinite(value) and value > 0):
        raise ProtocolError(f"{name} must be a positive number, got {value!r}")
    return float(value)


def checked_times(t: TimeLike, t_f: float) -> np.ndarray:
    times = np.asarray(t, dtype=float)
    slack = _TIME_SLACK * t_f
    if np.any(~np.isfinite(times)) or np.any(times < -slack) or np.any(times > t_f + slack):
        raise ProtocolError(f"time outside the protocol interval [0, {t_f:g}]")
    return np.clip(times, 0.0, t_f)


@dataclass(frozen=True, eq=False)
class ScalingFunction:
    """Quintic scaling function b(t) = sum_j a_j (t/t_f)^j.

    The coefficients are dimensionless and act on powers of s = t/t_f. Positivity on
    [0, t_f] is certified at construction on a dense sample.
    """

    coefficients: Tuple[float, ...]
    t_f: float
    omega0: float
    _derivatives: Tuple[Polynomial, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        coefficients = tuple(float(a) for a in self.coefficients)
        if len(coefficients) != 6:
            raise ScalingFunctionError(f"a quintic needs 6 coefficients, got {len(coefficients)}")
        if not all(math.isfinite(a) for a in coefficients):
            raise ScalingFunctionError("scaling coefficients must be finite")
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "t_f", _check_positive("t_f", self.t_f))
        object.__setattr__(self, "omega0", _check_positive("omega0", self.omega0))
        poly = Polynomial(coefficients)
        object.__setattr__(self, "_derivatives", tuple(poly.deriv(order) for order in range(4)))

        s = np.linspace(0.0, 1.0, POSITIVITY_SAMPLES)
        values = self._derivatives[0](s)
        if np.min(values) <= 0.0:
            where = float(s[np.argmin(values)] * self.t_f)
            raise ScalingFunctionError(f"b(t) is not positive on [0, t_f]; minimum {np.min(values):.6g} at t = {where:.6g}")

    def derivative(self, t: TimeLike, order: int = 0) -> TimeLike:
        """d^order b / dt^order for order 0..3."""
        times = checked_times(t, self.t_f)
        values = self._derivatives[order](times / self.t_f) / self.t_f**order
        return scalar_or_array(values, t)

    def b(self, t: TimeLike) -> TimeLike:
        return self.derivative(t, 0)

    def b_dot(self, t: TimeLike) -> TimeLike:
        return self.derivative(t, 1)

    def b_ddot(self, t: TimeLike) -> TimeLike:
        return self.derivative(t, 2)

    def b_dddot(self, t: TimeLike) -> TimeLike:
        return self.derivative(t, 3)

    @property
    def gamma(self) -> float:
        """Final stretch b(t_f)."""
        return float(sum(self.coefficients))

    def to_dict(self) -> Dict[str, Any]:
        return {"coefficients": list(self.coefficients), "t_f": self.t_f, "omega0": self.omega0}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScalingFunction":
        return cls(coefficients=tuple(data["coefficients"]), t_f=data["t_f"], omega0=data["omega0"])


def _difference_derivative(func, times: np.ndarray, step: float, t_f: float) -> np.ndarray:
    """Fourth-order finite differences, one-sided where the central stencil leaves [0, t_f]."""
    result = np.empty_like(times)
    for i, t in enumerate(times):
        if t - 2 * step < 0.0:
            samples = func(t + step * np.arange(5))
            result[i] = (-25 * samples[0] + 48 * samples[1] - 36 * samples[2] + 16 * samples[3] - 3 * samples[4]) / (
                12 * step
            )
        elif t + 2 * step > t_f:
            samples = func(t - step * np.arange(5))
            result[i] = -(-25 * samples[0] + 48 * samples[1] - 36 * samples[2] + 16 * samples[3] - 3 * samples[4]) / (
                12 * step
            )
        else:
            samples = func(t + step * np.array([-2.0, -1.0, 1.0, 2.0]))
            result[i] = (samples[0] - 8 * samples[1] + 8 * samples[2] - samples[3]) / (12 * step)
    return result


@dataclass(frozen=True, eq=False)
class FrequencyProtocol:
    """Trap frequency omega(t) over [0, t_f].

    ``constant`` and ``linear-ramp`` are closed forms, ``engineered`` follows from a scaling
    function through the Ermakov equation and ``tabulated`` interpolates sampled omega^2 values
    with a cubic spline. omega^2 may be negative for the last two kinds.
    """

    kind: ProtocolKind
    omega0: float
    omegaf: float
    t_f: float
    scaling: Optional[ScalingFunction] = None
    table: Optional[Tuple[np.ndarray, np.ndarray]] = None
    _spline: Optional[CubicSpline] = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in PROTOCOL_KINDS:
            raise ProtocolError(f"unknown protocol kind {self.kind!r}; expected one of {', '.join(PROTOCOL_KINDS)}")
        object.__setattr__(self, "omega0", _check_positive("omega0", self.omega0))
        object.__setattr__(self, "omegaf", _check_positive("omegaf", self.omegaf))
        object.__setattr__(self, "t_f", _check_positive("t_f", self.t_f))

        if self.kind == "constant" and self.omegaf != self.omega0:
            raise ProtocolError("a constant protocol needs omegaf == omega0")
        if self.kind == "engineered":
            if self.scaling is None:
                raise ProtocolError("an engineered protocol needs a scaling function")
            if self.scaling.t_f != self.t_f or self.scaling.omega0 != self.omega0:
                raise ProtocolError("scaling function t_f/omega0 do not match the protocol")
        if self.kind == "tabulated":
            self._build_spline()
        if self.kind in ("engineered", "tabulated"):
            self._check_endpoints()

    def _build_spline(self) -> None:
        if self.table is None:
            raise ProtocolError("a tabulated protocol needs a (times, omega_squared) table")
        times = np.asarray(self.table[0], dtype=float)
        values = np.asarray(self.table[1], dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 4:
            raise ProtocolError("tabulated protocol needs matching 1-D time and omega^2 columns with >= 4 rows")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ProtocolError("tabulated protocol contains non-finite values")
        if np.any(np.diff(times) <= 0):
            raise ProtocolError("tabulated times must be strictly increasing")
        if abs(times[0]) > _TIME_SLACK * self.t_f or abs(times[-1] - self.t_f) > _TIME_SLACK * self.t_f:
            raise ProtocolError(f"tabulated times must span [0, {self.t_f:g}]")
        object.__setattr__(self, "table", (times, values))
        object.__setattr__(self, "_spline", CubicSpline(times, values))

    def _check_endpoints(self) -> None:
        for label, t, expected in (("omega(0)^2", 0.0, self.omega0**2), ("omega(t_f)^2", self.t_f, self.omegaf**2)):
            value = self.omega_squared(t)
            if abs(value - expected) > ENDPOINT_TOLERANCE * expected:
                raise ProtocolError(f"{label} = {value:.12g} does not match {expected:.12g}")

    # Constructors

    @classmethod
    def constant(cls, omega: float, t_f: float) -> "FrequencyProtocol":
        return cls(kind="constant", omega0=omega, omegaf=omega, t_f=t_f)

    @classmethod
    def linear_ramp(cls, omega0: float, omegaf: float, t_f: float) -> "FrequencyProtocol":
        return cls(kind="linear-ramp", omega0=omega0, omegaf=omegaf, t_f=t_f)

    @classmethod
    def engineered(cls, scaling: ScalingFunction) -> "FrequencyProtocol":
        """omega^2(t) = omega0^2/b^4 - b''/b for the given scaling function."""
        gamma = scaling.gamma
        final_squared = scaling.omega0**2 / gamma**4 - scaling.b_ddot(scaling.t_f) / gamma
        if final_squared <= 0:
            raise ProtocolError(f"engineered protocol ends in an expulsive trap (omega^2 = {final_squared:.6g})")
        omegaf = math.sqrt(final_squared)
        return cls(kind="engineered", omega0=scaling.omega0, omegaf=omegaf, t_f=scaling.t_f, scaling=scaling)

    @classmethod
    def tabulated(cls, times: Sequence[float], omega_squared: Sequence[float]) -> "FrequencyProtocol":
        times = np.asarray(times, dtype=float)
        values = np.asarray(omega_squared, dtype=float)
        if times.size < 4 or values[0] <= 0 or values[-1] <= 0:
            raise ProtocolError("tabulated protocol needs >= 4 rows and positive omega^2 at both ends")
        return cls(
            kind="tabulated",
            omega0=math.sqrt(values[0]),
            omegaf=math.sqrt(values[-1]),
            t_f=float(times[-1]),
            table=(times, values),
        )

    # Evaluation

    def omega_squared(self, t: TimeLike) -> TimeLike:
        """omega(t)^2, possibly negative for engineered and tabulated kinds."""
        times = checked_times(t, self.t_f)
        if self.kind == "constant":
            values = np.full_like(times, self.omega0**2)
        elif self.kind == "linear-ramp":
            values = (self.omega0 + (self.omegaf - self.omega0) * times / self.t_f) ** 2
        elif self.kind == "engineered":
            b = self.scaling.b(times)
            values = self.omega0**2 / b**4 - self.scaling.b_ddot(times) / b
        else:
            values = self._spline(times)
        return scalar_or_array(np.asarray(values, dtype=float), t)

    def omega(self, t: TimeLike) -> TimeLike:
        """Real frequency sqrt(omega^2).

        Raises
        ------
            ProtocolError: If omega^2 is negative at any requested time

        """
        values = np.asarray(self.omega_squared(t))
        if np.any(values < 0):
            raise ProtocolError("omega(t) is not real where omega^2 < 0 (expulsive interval)")
        return scalar_or_array(np.sqrt(values), t)

    def omega_squared_dot(self, t: TimeLike) -> TimeLike:
        """d(omega^2)/dt."""
        times = checked_times(t, self.t_f)
        if self.kind == "constant":
            values = np.zeros_like(times)
        elif self.kind == "linear-ramp":
            rate = (self.omegaf - self.omega0) / self.t_f
            values = 2.0 * (self.omega0 + rate * times) * rate
        elif self.kind == "engineered":
            scaling = self.scaling
            b = scaling.b(times)
            b_dot = scaling.b_dot(times)
            b_ddot = scaling.b_ddot(times)
            b_dddot = scaling.b_dddot(times)
            values = -4.0 * self.omega0**2 * b_dot / b**5 - (b_dddot * b - b_ddot * b_dot) / b**2
        else:
            values = self._spline(times, 1)
        return scalar_or_array(np.asarray(values, dtype=float), t)

    def omega_dot(self, t: TimeLike) -> TimeLike:
        """d(omega)/dt where omega^2 > 0.

        Analytic for closed forms and engineered protocols; fourth-order finite differences of
        sqrt(omega^2) with step 1e-6 t_f for tabulated ones.
        """
        times = checked_times(t, self.t_f)
        if self.kind == "constant":
            values = np.zeros_like(times)
        elif self.kind == "linear-ramp":
            values = np.full_like(times, (self.omegaf - self.omega0) / self.t_f)
        elif self.kind == "engineered":
            values = np.asarray(self.omega_squared_dot(times)) / (2.0 * np.asarray(self.omega(times)))
        else:
            times = np.atleast_1d(times)
            values = _difference_derivative(
                lambda s: np.sqrt(self._spline(np.clip(s, 0.0, self.t_f))),
                times,
                DIFFERENCE_STEP * self.t_f,
                self.t_f,
            )
            values = values.reshape(np.shape(t))
        return scalar_or_array(np.asarray(values, dtype=float), t)

    def sample(self, n_samples: int) -> Tuple[np.ndarray, np.ndarray]:
        """Evenly spaced (t, omega^2) samples including both endpoints."""
        if n_samples < 2:
            raise ProtocolError(f"need at least 2 samples, got {n_samples}")
        times = np.linspace(0.0, self.t_f, n_samples)
        return times, np.asarray(self.omega_squared(times))

    def min_omega_squared(self, n_samples: int = POSITIVITY_SAMPLES) -> float:
        return float(np.min(self.sample(n_samples)[1]))

    # Serialization

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind, "omega0": self.omega0, "omegaf": self.omegaf, "t_f": self.t_f}
        if self.kind == "engineered":
            data["scaling"] = self.scaling.to_dict()
        if self.kind == "tabulated":
            data["table"] = {"times": self.table[0].tolist(), "omega_squared": self.table[1].tolist()}
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FrequencyProtocol":
        kind = data.get("kind")
        if kind == "engineered":
            return cls.engineered(ScalingFunction.from_dict(data["scaling"]))
        if kind == "tabulated":
            return cls.tabulated(data["table"]["times"], data["table"]["omega_squared"])
        return cls(kind=kind, omega0=data["omega0"], omegaf=data["omegaf"], t_f=data["t_f"])
