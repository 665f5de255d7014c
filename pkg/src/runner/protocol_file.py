"""Protocol files: the JSON input of every command.

A file has ``"version": 1`` and the blocks below; unknown keys are rejected so typos surface
with their line number. Serialization is canonical (sorted keys, two-space indent, trailing
newline), so ``dumps(loads(text))`` reproduces any canonical file byte for byte.
An omitted or ``"auto"`` grid is sized from the runs it has to hold.

    {
      "version": 1,
      "method": "ii",
      "omega0": 1.0, "omegaf": 0.1, "t_f": 1.0,
      "units": {"hbar": 1.0, "mass": 1.0},
      "grid": {"x_max": 40.0, "n_points": 1024} or "auto",
      "propagation": {"n_steps": 10000, "n_observers": 200, "n_max": 8, "kappa": 1.0},
      "initial_states": [0, 1, 2, 3],
      "design": {"n_samples": 1001},
      "methods": ["ii", "plain"],
      "protocol": {...},
      "raman": {...}
    }
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from sta.dynamics import DEFAULT_OBSERVER_N_MAX, DEFAULT_OBSERVERS, DEFAULT_STEPS, METHODS, grid_for
from sta.errors import InvalidInputError, ProtocolFileError
from sta.invariant import design_quintic, invert_ermakov
from sta.models import SpatialGrid, UnitSystem
from sta.protocols import FrequencyProtocol
from sta.raman import RamanParams

# Set up logging
logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
DEFAULT_DESIGN_SAMPLES = 1001

_REQUIRED = ("version", "method", "omega0", "omegaf", "t_f", "initial_states")
_OPTIONAL = ("grid", "units", "propagation", "design", "methods", "protocol", "raman")
_RAMAN_FIELDS = ("Omega1", "Omega2", "omega1", "omega2", "phi1", "phi2", "k1", "k2", "omega_e", "omega", "mass")


def _line_of(text: str, key: str) -> Optional[int]:
    """Line of the first occurrence of ``"key"`` in the source text."""
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


class _Reader:
    """Typed field access with line-aware diagnostics."""

    def __init__(self, text: str):
        self.text = text

    def fail(self, message: str, path: str) -> ProtocolFileError:
        return ProtocolFileError(message, field=path, line=_line_of(self.text, path.split(".")[-1]))

    def block(self, data: Dict[str, Any], key: str, path: str, allowed: tuple, required: tuple = ()) -> Dict[str, Any]:
        value = data[key]
        if not isinstance(value, dict):
            raise self.fail("must be an object", path)
        for name in value:
            if name not in allowed:
                raise self.fail(f"unknown field '{name}'", f"{path}.{name}")
        for name in required:
            if name not in value:
                raise self.fail(f"missing field '{name}'", f"{path}.{name}")
        return value

    def number(self, data: Dict[str, Any], key: str, path: str, positive: bool = True) -> float:
        value = data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise self.fail("must be a finite number", path)
        if positive and value <= 0:
            raise self.fail("must be positive", path)
        return float(value)

    def integer(self, data: Dict[str, Any], key: str, path: str, minimum: int = 0) -> int:
        value = data[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail("must be an integer", path)
        if value < minimum:
            raise self.fail(f"must be >= {minimum}", path)
        return value


@dataclass(frozen=True, eq=False)
class ProtocolFile:
    """Parsed protocol file. A ``None`` grid is sized per run by :meth:`resolve_grid`."""

    method: str
    omega0: float
    omegaf: float
    t_f: float
    initial_states: List[int]
    grid: Optional[SpatialGrid] = None
    units: UnitSystem = UnitSystem()
    n_steps: int = DEFAULT_STEPS
    n_observers: int = DEFAULT_OBSERVERS
    n_max: int = DEFAULT_OBSERVER_N_MAX
    kappa: float = 1.0
    design_samples: int = DEFAULT_DESIGN_SAMPLES
    methods: Optional[List[str]] = None
    protocol: Optional[FrequencyProtocol] = None
    raman: Optional[RamanParams] = None
    version: int = field(default=FORMAT_VERSION)

    @property
    def duration(self) -> float:
        """Protocol duration, t_f stretched by kappa."""
        return self.kappa * self.t_f

    def protocol_for(self, method: str) -> FrequencyProtocol:
        """Trap protocol driven by ``method``.

        An explicit ``protocol`` block wins and keeps its own duration (loading rejects kappa != 1
        with one); otherwise ``ii`` uses the quintic design and the other methods a linear ramp
        (a constant trap when omega0 == omegaf).
        """
        if self.protocol is not None:
            if method == "ii" and self.protocol.kind != "engineered":
                raise InvalidInputError("method 'ii' needs an engineered protocol block")
            return self.protocol
        if method == "ii":
            return invert_ermakov(design_quintic(self.omega0, self.omegaf, self.duration))
        if self.omega0 == self.omegaf:
            return FrequencyProtocol.constant(self.omega0, self.duration)
        return FrequencyProtocol.linear_ramp(self.omega0, self.omegaf, self.duration)

    def resolve_grid(self, methods: Sequence[str]) -> SpatialGrid:
        """The file's grid, or one sized for every state the given methods visit."""
        if self.grid is not None:
            return self.grid
        runs = [(self.protocol_for(m), m) for m in methods]
        return grid_for(runs, self.n_max, self.units, initial_states=self.initial_states)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "version": self.version,
            "method": self.method,
            "omega0": self.omega0,
            "omegaf": self.omegaf,
            "t_f": self.t_f,
            "units": {"hbar": self.units.hbar, "mass": self.units.mass},
            "grid": "auto" if self.grid is None else self.grid.to_dict(),
            "propagation": {
                "n_steps": self.n_steps,
                "n_observers": self.n_observers,
                "n_max": self.n_max,
                "kappa": self.kappa,
            },
            "initial_states": list(self.initial_states),
            "design": {"n_samples": self.design_samples},
        }
        if self.methods is not None:
            data["methods"] = list(self.methods)
        if self.protocol is not None:
            data["protocol"] = self.protocol.to_dict()
        if self.raman is not None:
            data["raman"] = self.raman.to_dict()
        return data


def _check_method(reader: _Reader, value: Any, path: str) -> str:
    if value not in METHODS:
        raise reader.fail(f"must be one of {', '.join(METHODS)}", path)
    return value


def loads(text: str) -> ProtocolFile:
    """Parse and validate a protocol file.

    Raises
    ------
        ProtocolFileError: With the offending field and line

    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProtocolFileError(f"invalid JSON: {e.msg}", line=e.lineno)
    if not isinstance(data, dict):
        raise ProtocolFileError("top level must be an object", line=1)

    reader = _Reader(text)
    for key in data:
        if key not in _REQUIRED + _OPTIONAL:
            raise reader.fail(f"unknown field '{key}'", key)
    for key in _REQUIRED:
        if key not in data:
            raise ProtocolFileError(f"missing required field '{key}'", field=key)
    if data["version"] != FORMAT_VERSION or isinstance(data["version"], bool):
        raise reader.fail(f"unsupported version {data['version']!r}; expected {FORMAT_VERSION}", "version")

    method = _check_method(reader, data["method"], "method")
    omega0 = reader.number(data, "omega0", "omega0")
    omegaf = reader.number(data, "omegaf", "omegaf")
    t_f = reader.number(data, "t_f", "t_f")

    units = UnitSystem()
    if "units" in data:
        block = reader.block(data, "units", "units", ("hbar", "mass"), ("hbar", "mass"))
        units = UnitSystem(hbar=reader.number(block, "hbar", "units.hbar"), mass=reader.number(block, "mass", "units.mass"))

    grid = None
    if data.get("grid", "auto") != "auto":
        block = reader.block(data, "grid", "grid", ("x_max", "n_points"), ("x_max", "n_points"))
        try:
            grid = SpatialGrid(
                x_max=reader.number(block, "x_max", "grid.x_max"),
                n_points=reader.integer(block, "n_points", "grid.n_points", minimum=1),
            )
        except ProtocolFileError:
            raise
        except InvalidInputError as e:
            raise reader.fail(str(e), "grid")

    propagation: Dict[str, Any] = {}
    if "propagation" in data:
        block = reader.block(data, "propagation", "propagation", ("n_steps", "n_observers", "n_max", "kappa"))
        if "n_steps" in block:
            propagation["n_steps"] = reader.integer(block, "n_steps", "propagation.n_steps", minimum=1)
        if "n_observers" in block:
            propagation["n_observers"] = reader.integer(block, "n_observers", "propagation.n_observers", minimum=2)
        if "n_max" in block:
            propagation["n_max"] = reader.integer(block, "n_max", "propagation.n_max")
        if "kappa" in block:
            propagation["kappa"] = reader.number(block, "kappa", "propagation.kappa")
            if propagation["kappa"] < 1.0:
                raise reader.fail("must be >= 1", "propagation.kappa")

    states = data["initial_states"]
    if not isinstance(states, list) or not states:
        raise reader.fail("must be a non-empty list of Fock indices", "initial_states")
    for n in states:
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise reader.fail(f"invalid Fock index {n!r}", "initial_states")

    design_samples = DEFAULT_DESIGN_SAMPLES
    if "design" in data:
        block = reader.block(data, "design", "design", ("n_samples",))
        if "n_samples" in block:
            design_samples = reader.integer(block, "n_samples", "design.n_samples", minimum=2)

    methods = None
    if "methods" in data:
        if not isinstance(data["methods"], list):
            raise reader.fail("must be a list of methods", "methods")
        methods = [_check_method(reader, m, "methods") for m in data["methods"]]

    protocol = None
    if "protocol" in data:
        if not isinstance(data["protocol"], dict):
            raise reader.fail("must be an object", "protocol")
        try:
            protocol = FrequencyProtocol.from_dict(data["protocol"])
        except KeyError as e:
            raise reader.fail(f"missing field {e.args[0]!r}", "protocol")
        except (InvalidInputError, TypeError) as e:
            raise reader.fail(str(e), "protocol")
        for name, value in (("omega0", omega0), ("omegaf", omegaf), ("t_f", t_f)):
            if not math.isclose(getattr(protocol, name), value, rel_tol=1e-9):
                raise reader.fail(f"protocol {name} = {getattr(protocol, name)!r} does not match {value!r}", name)
        if propagation.get("kappa", 1.0) != 1.0:
            raise reader.fail("must be 1 with an explicit protocol block", "propagation.kappa")

    raman = None
    if "raman" in data:
        block = reader.block(data, "raman", "raman", _RAMAN_FIELDS, _RAMAN_FIELDS[:-1])
        values = {
            name: reader.number(block, name, f"raman.{name}", positive=name not in ("phi1", "phi2", "k1", "k2"))
            for name in block
        }
        raman = RamanParams(**values)

    parsed = ProtocolFile(
        method=method,
        omega0=omega0,
        omegaf=omegaf,
        t_f=t_f,
        grid=grid,
        initial_states=list(states),
        units=units,
        design_samples=design_samples,
        methods=methods,
        protocol=protocol,
        raman=raman,
        **propagation,
    )
    logger.debug(f"Parsed protocol file: method={method}, states={states}")
    return parsed


def dumps(protocol_file: ProtocolFile) -> str:
    """Canonical JSON text of a protocol file."""
    return json.dumps(protocol_file.to_dict(), indent=2, sort_keys=True) + "\n"


def load(path: Union[str, Path]) -> ProtocolFile:
    """Read a protocol file from disk."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ProtocolFileError(f"cannot read {path}: {e.strerror}")
    return loads(text)


def dump(protocol_file: ProtocolFile, path: Union[str, Path]) -> None:
    """Write a protocol file in canonical form."""
    Path(path).write_text(dumps(protocol_file), encoding="utf-8")
