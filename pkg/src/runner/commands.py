"""The four commands: design, propagate, raman and compare.

Each command reads a parsed protocol file, writes its artifacts into ``out_dir`` and returns
the summary dictionary it also wrote as JSON. Initial states run concurrently in worker
threads, at most ``threads`` at a time.
"""

import asyncio
import dataclasses
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from sta.dynamics import METHODS, PropagationPlan, TrajectoryRecord, propagate, required_steps
from sta.errors import InvalidInputError, MissingSectionError
from sta.invariant import detect_expulsive, scaling_extent
from sta.models import SpatialGrid
from sta.oscillator import eigenstate
from sta.raman import adiabaticity_diagnostic, effective_params, second_sideband_coupling, tt_mismatch_report
from utils.logging import log_command, log_result

from .output import RunSummary, write_csv, write_json, write_trajectory
from .protocol_file import ProtocolFile

# Set up logging
logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _adiabaticity(protocol) -> float:
    return adiabaticity_diagnostic(protocol).max_value


async def cmd_design(protocol_file: ProtocolFile, out_dir: PathLike) -> Dict[str, Any]:
    """Tabulate the inverse-engineered b(t) and omega^2(t) and summarize the design.

    Writes ``design.csv`` (t, b, b_dot, b_ddot, omega_squared) and ``design_summary.json``.
    """
    if protocol_file.method != "ii":
        raise InvalidInputError(f"design needs method 'ii', got {protocol_file.method!r}")
    started = time.perf_counter()
    log_command(logger, "design", "method ii", {"n_samples": protocol_file.design_samples})

    def work() -> Dict[str, Any]:
        protocol = protocol_file.protocol_for("ii")
        scaling = protocol.scaling
        times = np.linspace(0.0, protocol.t_f, protocol_file.design_samples)
        columns = (
            times,
            np.asarray(scaling.b(times)),
            np.asarray(scaling.b_dot(times)),
            np.asarray(scaling.b_ddot(times)),
            np.asarray(protocol.omega_squared(times)),
        )
        write_csv(Path(out_dir) / "design.csv", ("t", "b", "b_dot", "b_ddot", "omega_squared"), zip(*columns))
        intervals = detect_expulsive(protocol)
        summary = RunSummary(
            command="design",
            method="ii",
            min_omega_squared=float(np.min(columns[4])),
            expulsive_intervals=intervals,
            max_adiabaticity=_adiabaticity(protocol),
            diagnostics={
                "gamma": scaling.gamma,
                "coefficients": list(scaling.coefficients),
                "omegaf": protocol.omegaf,
                "t_f": protocol.t_f,
                "scaling_extent": scaling_extent(scaling).to_dict(),
            },
        )
        return summary.to_dict()

    payload = await asyncio.to_thread(work)
    payload["wall_time"] = time.perf_counter() - started
    write_json(Path(out_dir) / "design_summary.json", payload)
    log_result(logger, "design", payload)
    return payload


def _plan(protocol_file: ProtocolFile, method: str, grid: SpatialGrid, adapt_steps: bool = False) -> PropagationPlan:
    protocol = protocol_file.protocol_for(method)
    n_steps = protocol_file.n_steps
    if adapt_steps:
        needed = required_steps(protocol, method)
        if needed > n_steps:
            logger.info(f"Method {method} needs {needed} steps; raising from {n_steps}")
            n_steps = needed
    return PropagationPlan(
        method=method,
        protocol=protocol,
        grid=grid,
        n_steps=n_steps,
        units=protocol_file.units,
        n_observers=protocol_file.n_observers,
        n_max=protocol_file.n_max,
    )


def _propagate_state(plan: PropagationPlan, protocol_file: ProtocolFile, n: int) -> TrajectoryRecord:
    psi0 = eigenstate(n, protocol_file.omega0, plan.grid, protocol_file.units)
    record = propagate(psi0, plan)
    return dataclasses.replace(record, initial_state=n)


async def run_states(
    plan: PropagationPlan,
    protocol_file: ProtocolFile,
    states: Sequence[int],
    threads: int,
) -> List[TrajectoryRecord]:
    """Propagate every initial state, at most ``threads`` concurrently."""
    semaphore = asyncio.Semaphore(max(1, threads))

    async def one(n: int) -> TrajectoryRecord:
        async with semaphore:
            logger.info(f"Starting {plan.method} run for n={n}")
            return await asyncio.to_thread(_propagate_state, plan, protocol_file, n)

    return list(await asyncio.gather(*(one(n) for n in states)))


def _record_summary(record: TrajectoryRecord) -> Dict[str, Any]:
    return {
        "final_fidelity": record.final_fidelity,
        "final_populations": record.final_populations,
        "max_population_deviation": record.max_population_deviation(),
        "invariant_drift": record.invariant_drift(),
        "norm_drift": record.norm_drift(),
        "wall_time": record.wall_time,
    }


async def cmd_propagate(protocol_file: ProtocolFile, out_dir: PathLike, threads: int = 1) -> Dict[str, Any]:
    """Propagate every initial state with the file's method.

    Writes ``trajectory_<method>_n<k>.csv`` per state and ``summary.json``.
    """
    started = time.perf_counter()
    method = protocol_file.method
    log_command(logger, "propagate", f"method {method}", {"states": protocol_file.initial_states, "threads": threads})
    grid = await asyncio.to_thread(protocol_file.resolve_grid, [method])
    plan = await asyncio.to_thread(_plan, protocol_file, method, grid)
    records = await run_states(plan, protocol_file, protocol_file.initial_states, threads)
    for record in records:
        write_trajectory(out_dir, record)

    protocol = plan.protocol
    summary = RunSummary(
        command="propagate",
        method=method,
        final_fidelities={str(r.initial_state): r.final_fidelity for r in records},
        min_omega_squared=protocol.min_omega_squared(),
        expulsive_intervals=detect_expulsive(protocol),
        max_adiabaticity=_adiabaticity(protocol),
        wall_time=time.perf_counter() - started,
        diagnostics={
            "n_steps": plan.n_steps,
            "dt": plan.dt,
            "grid": grid.to_dict(),
            "observer_n_max": records[0].n_max,
            "states": {str(r.initial_state): _record_summary(r) for r in records},
        },
    )
    payload = summary.to_dict()
    write_json(Path(out_dir) / "summary.json", payload)
    log_result(logger, "propagate", payload)
    return payload


async def cmd_raman(protocol_file: ProtocolFile, out_dir: PathLike) -> Dict[str, Any]:
    """Raman feasibility report: effective parameters, sideband flags and the mismatch series.

    Writes ``raman.json`` and ``mismatch.csv``.
    """
    if protocol_file.raman is None:
        raise MissingSectionError("the protocol file has no 'raman' block")
    log_command(logger, "raman", f"method {protocol_file.method}")
    started = time.perf_counter()

    def work() -> Dict[str, Any]:
        eff = effective_params(protocol_file.raman, protocol_file.units)
        coupling = second_sideband_coupling(eff)
        protocol = protocol_file.protocol_for(protocol_file.method)
        report = tt_mismatch_report(protocol, eff)
        write_csv(
            Path(out_dir) / "mismatch.csv",
            ("t", "required", "available", "mismatch", "period_variation"),
            (
                (t, required, report.available, mismatch, variation)
                for t, required, mismatch, variation in zip(
                    report.times, report.required, report.mismatch, report.period_variation
                )
            ),
        )
        return {
            "command": "raman",
            "raw": protocol_file.raman.to_dict(),
            "effective": eff.to_dict(),
            "sideband": coupling.to_dict(),
            "adiabaticity": report.diagnostic.to_dict(),
            "mismatch": report.summary(),
        }

    payload = await asyncio.to_thread(work)
    payload["wall_time"] = time.perf_counter() - started
    write_json(Path(out_dir) / "raman.json", payload)
    log_result(logger, "raman", payload)
    return payload


def _check_methods(methods: Sequence[str]) -> List[str]:
    methods = list(dict.fromkeys(methods))
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise InvalidInputError(f"unknown method(s): {', '.join(unknown)}")
    if len(methods) < 2:
        raise InvalidInputError("compare needs at least two different methods")
    return methods


async def cmd_compare(
    protocol_file: ProtocolFile,
    out_dir: PathLike,
    methods: Optional[Sequence[str]] = None,
    threads: int = 1,
) -> Dict[str, Any]:
    """Run several methods from the same initial states on the same grid.

    Writes ``compare.csv`` (one row per method and state) and ``compare.json``.
    """
    methods = _check_methods(methods if methods is not None else (protocol_file.methods or []))
    started = time.perf_counter()
    log_command(logger, "compare", f"methods {','.join(methods)}", {"states": protocol_file.initial_states})

    grid = await asyncio.to_thread(protocol_file.resolve_grid, methods)
    rows = []
    results: Dict[str, Any] = {}
    for method in methods:
        method_started = time.perf_counter()
        plan = await asyncio.to_thread(_plan, protocol_file, method, grid, True)
        records = await run_states(plan, protocol_file, protocol_file.initial_states, threads)
        protocol = plan.protocol
        min_omega_squared = protocol.min_omega_squared()
        runtime = time.perf_counter() - method_started
        for record in records:
            rows.append(
                (
                    method,
                    record.initial_state,
                    record.final_fidelity,
                    record.max_population_deviation(),
                    min_omega_squared,
                ),
            )
        results[method] = {
            "final_fidelities": {str(r.initial_state): r.final_fidelity for r in records},
            "max_population_deviation": {str(r.initial_state): r.max_population_deviation() for r in records},
            "min_omega_squared": min_omega_squared,
            "n_steps": plan.n_steps,
            "runtime": runtime,
        }

    write_csv(
        Path(out_dir) / "compare.csv",
        ("method", "n", "final_fidelity", "max_population_deviation", "min_omega_squared"),
        rows,
    )
    payload = {
        "command": "compare",
        "methods": methods,
        "initial_states": list(protocol_file.initial_states),
        "grid": grid.to_dict(),
        "results": results,
        "wall_time": time.perf_counter() - started,
    }
    write_json(Path(out_dir) / "compare.json", payload)
    log_result(logger, "compare", payload)
    return payload
