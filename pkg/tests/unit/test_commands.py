"""Tests for the design, propagate, raman and compare commands."""

import csv
import json
import math

import pytest

from runner.commands import cmd_compare, cmd_design, cmd_propagate, cmd_raman
from sta.errors import InvalidInputError, MissingSectionError

from .conftest import RAMAN_BLOCK, make_protocol_file


def read_rows(path):
    with path.open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


@pytest.mark.asyncio
async def test_design_without_frequency_change(tmp_path):
    payload = await cmd_design(make_protocol_file(omegaf=1.0), tmp_path)

    assert payload["command"] == "design"
    assert payload["diagnostics"]["gamma"] == 1.0
    assert payload["min_omega_squared"] == pytest.approx(1.0)
    assert payload["expulsive_intervals"] == []
    rows = read_rows(tmp_path / "design.csv")
    assert len(rows) == 1001
    assert all(float(row["b"]) == 1.0 for row in rows)
    assert json.loads((tmp_path / "design_summary.json").read_text())["method"] == "ii"


@pytest.mark.asyncio
async def test_design_doubling_the_width(tmp_path):
    payload = await cmd_design(make_protocol_file(omegaf=0.25, t_f=4.0), tmp_path)

    assert payload["diagnostics"]["gamma"] == pytest.approx(2.0)
    rows = read_rows(tmp_path / "design.csv")
    assert list(rows[0]) == ["t", "b", "b_dot", "b_ddot", "omega_squared"]
    assert float(rows[500]["t"]) == pytest.approx(2.0)
    assert float(rows[500]["b"]) == pytest.approx(1.5)
    assert float(rows[-1]["omega_squared"]) == pytest.approx(0.0625)


@pytest.mark.asyncio
async def test_design_reports_expulsive_intervals(tmp_path):
    payload = await cmd_design(make_protocol_file(), tmp_path)

    assert payload["min_omega_squared"] < 0
    assert len(payload["expulsive_intervals"]) >= 1
    start, end = payload["expulsive_intervals"][0]
    assert 0 < start < end < 1
    assert math.isnan(payload["max_adiabaticity"])


@pytest.mark.asyncio
async def test_design_needs_invariant_method(tmp_path):
    with pytest.raises(InvalidInputError):
        await cmd_design(make_protocol_file(method="tt"), tmp_path)


@pytest.mark.asyncio
async def test_propagate_writes_one_trajectory_per_state(tmp_path):
    protocol_file = make_protocol_file(method="tt")
    payload = await cmd_propagate(protocol_file, tmp_path / "a", threads=2)

    assert set(payload["final_fidelities"]) == {"0", "1"}
    assert all(value >= 0.999 for value in payload["final_fidelities"].values())
    assert payload["diagnostics"]["n_steps"] == 2000
    assert payload["diagnostics"]["observer_n_max"] == 4

    rows = read_rows(tmp_path / "a" / "trajectory_tt_n1.csv")
    assert list(rows[0]) == ["t", "P0", "P1", "P2", "P3", "P4", "fidelity_vs_target", "invariant", "energy", "norm", "phase"]
    assert len(rows) == 50
    assert float(rows[0]["P1"]) == pytest.approx(1.0)
    assert float(rows[-1]["t"]) == pytest.approx(1.0)

    await cmd_propagate(protocol_file, tmp_path / "b", threads=1)
    for name in ("trajectory_tt_n0.csv", "trajectory_tt_n1.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.asyncio
async def test_raman_needs_its_block(tmp_path):
    with pytest.raises(MissingSectionError) as info:
        await cmd_raman(make_protocol_file(method="tt"), tmp_path)
    assert info.value.exit_code == 3


@pytest.mark.asyncio
async def test_raman_report(tmp_path):
    payload = await cmd_raman(make_protocol_file(method="tt", raman=RAMAN_BLOCK), tmp_path)

    assert payload["effective"]["Delta"] == 1.0
    assert payload["effective"]["half_Omega"] == pytest.approx(0.25)
    assert payload["effective"]["stark"] == pytest.approx(0.5)
    assert payload["sideband"]["coefficient"] == pytest.approx(0.25)
    assert payload["sideband"]["resonance_ok"] and payload["sideband"]["phase_ok"]
    assert payload["adiabaticity"]["max_value"] == pytest.approx(90.0)
    assert payload["mismatch"]["cannot_track"]
    assert len(read_rows(tmp_path / "mismatch.csv")) == 1001
    assert json.loads((tmp_path / "raman.json").read_text())["command"] == "raman"


@pytest.mark.asyncio
@pytest.mark.parametrize("methods", [["ii"], ["ii", "ii"], ["ii", "warp"]])
async def test_compare_rejects_method_lists(methods, tmp_path):
    with pytest.raises(InvalidInputError):
        await cmd_compare(make_protocol_file(), tmp_path, methods=methods)


@pytest.mark.asyncio
async def test_compare_uses_file_methods_by_default(tmp_path):
    with pytest.raises(InvalidInputError, match="at least two"):
        await cmd_compare(make_protocol_file(), tmp_path)


@pytest.mark.asyncio
async def test_compare_invariant_design_with_plain_ramp(tmp_path):
    protocol_file = make_protocol_file(methods=["ii", "plain"], initial_states=[0])
    payload = await cmd_compare(protocol_file, tmp_path, threads=2)

    assert payload["methods"] == ["ii", "plain"]
    assert payload["results"]["ii"]["final_fidelities"]["0"] >= 0.999
    assert payload["results"]["plain"]["final_fidelities"]["0"] < 0.95
    assert payload["results"]["ii"]["min_omega_squared"] < 0
    assert payload["results"]["plain"]["min_omega_squared"] == pytest.approx(0.01)
    assert "runtime" in payload["results"]["plain"]

    rows = read_rows(tmp_path / "compare.csv")
    assert [(row["method"], row["n"]) for row in rows] == [("ii", "0"), ("plain", "0")]
    assert json.loads((tmp_path / "compare.json").read_text())["grid"] == {"n_points": 1024, "x_max": 40.0}
