"""CSV and JSON result files."""

import csv
import logging
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

from sta.dynamics import TrajectoryRecord
from utils.error_handling import safe_json_dumps

# Set up logging
logger = logging.getLogger(__name__)

_write_locks: Dict[str, threading.Lock] = {}
_registry_lock = threading.Lock()


def _lock_for(path: Path) -> threading.Lock:
    key = str(path.resolve())
    with _registry_lock:
        return _write_locks.setdefault(key, threading.Lock())


def format_number(value: Any) -> str:
    """17 significant digits, enough to round-trip a double."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    number = float(value)
    if math.isnan(number):
        return "nan"
    return f"{number:.17g}"


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a numeric table; writes to the same path are serialized."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with _lock_for(path), path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else format_number(cell) for cell in row])
    logger.debug(f"Wrote {path}")
    return path


def write_json(path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    """Write pretty JSON (NaN becomes null)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with _lock_for(path):
        path.write_text(safe_json_dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.debug(f"Wrote {path}")
    return path


def trajectory_header(record: TrajectoryRecord) -> List[str]:
    populations = [f"P{n}" for n in range(record.n_max + 1)]
    return ["t", *populations, "fidelity_vs_target", "invariant", "energy", "norm", "phase"]


def trajectory_rows(record: TrajectoryRecord) -> List[Tuple[Any, ...]]:
    return [
        (
            record.times[i],
            *record.populations[i],
            record.fidelity[i],
            record.invariant[i],
            record.energy[i],
            record.norm[i],
            record.phase[i],
        )
        for i in range(len(record.times))
    ]


def trajectory_filename(method: str, n: int) -> str:
    return f"trajectory_{method}_n{n}.csv"


def write_trajectory(out_dir: Union[str, Path], record: TrajectoryRecord) -> Path:
    """Write one trajectory CSV named after its method and initial state."""
    name = trajectory_filename(record.method, record.initial_state)
    return write_csv(Path(out_dir) / name, trajectory_header(record), trajectory_rows(record))


@dataclass
class RunSummary:
    """Summary of a command run, written as JSON."""

    command: str
    method: str
    final_fidelities: Dict[str, float] = field(default_factory=dict)
    min_omega_squared: float = math.nan
    expulsive_intervals: List[Tuple[float, float]] = field(default_factory=list)
    max_adiabaticity: float = math.nan
    wall_time: float = 0.0
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "method": self.method,
            "final_fidelities": self.final_fidelities,
            "min_omega_squared": self.min_omega_squared,
            "expulsive_intervals": [list(interval) for interval in self.expulsive_intervals],
            "max_adiabaticity": self.max_adiabaticity,
            "wall_time": self.wall_time,
            "diagnostics": self.diagnostics,
        }
