"""End-to-end tests for the command-line interface."""

import json
import math

import pytest

from planar3rpr import (
    ActuationMode,
    Pose,
    RobotGeometry,
    inverse_kinematics,
    jacobians,
    normalized_margin,
)
from planar3rpr.cli import run

R3 = math.sqrt(3.0)
HOME = ["45", "25.980762113533", "0"]


def _sig12(value):
    return float(f"{value:.12g}")


class TestUsage:
    def test_no_command_is_usage_error(self):
        result = run([])
        assert result.code == 2
        assert "COMMAND" in result.err

    def test_unknown_command_is_usage_error(self):
        assert run(["frobnicate"]).code == 2

    def test_help(self):
        result = run(["--help"])
        assert result.code == 0
        assert "usage:" in result.out

    def test_subcommand_help(self):
        result = run(["workspace", "--help"])
        assert result.code == 0
        assert "check" in result.out

    def test_version(self):
        result = run(["--version"])
        assert result.code == 0
        assert "planar3rpr" in result.out

    def test_records_are_valid_json(self):
        result = run(["ik", "--pose", *HOME])
        parsed = json.loads(result.out)
        assert parsed["schema"] == "planar3rpr/1"
        assert parsed == result.record


class TestIk:
    def test_home_pose(self):
        result = run(["ik", "--pose", *HOME])
        assert result.code == 0
        rho = result.record["rho"]
        expected = _sig12(20.0 * R3)
        assert rho == [expected] * 3

    def test_matches_library(self):
        result = run(["ik", "--pose", "52", "31", "0.4"])
        joints = inverse_kinematics(RobotGeometry(), Pose(52.0, 31.0, 0.4))
        assert result.record["rho"] == [_sig12(v) for v in joints.rho]
        assert result.record["theta"] == [_sig12(v) for v in joints.theta]

    def test_degrees_flag(self):
        rad = run(["ik", "--pose", "45", "25.980762113533", str(math.pi)])
        deg = run(["ik", "--pose", "45", "25.980762113533", "180", "--deg"])
        assert deg.record["rho"] == rad.record["rho"]

    def test_serial_pose_is_domain_error(self):
        result = run(["ik", "--pose", "15", str(5.0 * R3), "0"])
        assert result.code == 1
        assert "leg 1" in result.err


class TestFk:
    def test_roundtrip_home(self):
        joints = inverse_kinematics(RobotGeometry(), Pose(45.0, 15.0 * R3, 0.0))
        result = run(
            ["fk", "--theta", *(str(t) for t in joints.theta), "--rho", *(str(r) for r in joints.rho)]
        )
        assert result.code == 0
        assert result.record["pose"]["x"] == pytest.approx(45.0, abs=1e-9)
        assert result.record["pose"]["y"] == pytest.approx(15.0 * R3, abs=1e-9)
        assert abs(result.record["residual"]) < 1e-9

    def test_inconsistent_sensors(self):
        joints = inverse_kinematics(RobotGeometry(), Pose(45.0, 15.0 * R3, 0.0))
        rho = [joints.rho[0], joints.rho[1], joints.rho[2] + 1.0]
        result = run(["fk", "--theta", *(str(t) for t in joints.theta), "--rho", *(str(r) for r in rho)])
        assert result.code == 1
        assert "residual" in result.err


class TestJacobian:
    def test_matches_library(self):
        result = run(["jacobian", "--pose", *HOME, "--mode", "1"])
        jac = jacobians(RobotGeometry(), Pose(45.0, 15.0 * R3, 0.0), ActuationMode.from_index(1))
        assert result.record["det_A"] == _sig12(-45.0)
        assert result.record["margin"] == _sig12(normalized_margin(jac))
        assert result.record["drive"] == "RRR"
        assert len(result.record["A"]) == 3 and len(result.record["A"][0]) == 3

    def test_singular_mode_reports_zero_margin(self):
        result = run(["jacobian", "--pose", *HOME, "--mode", "8"])
        assert result.code == 0
        assert abs(result.record["margin"]) < 1e-12

    def test_serial_pose_fails(self):
        result = run(["jacobian", "--pose", "15", str(5.0 * R3), "0", "--mode", "1"])
        assert result.code == 1


class TestSingEval:
    def test_all_modes_by_default(self):
        result = run(["sing", "eval", "--pose", *HOME])
        assert result.code == 0
        entries = result.record["modes"]
        assert [e["mode"] for e in entries] == list(range(1, 9))
        by_mode = {e["mode"]: e for e in entries}
        assert by_mode[1]["value"] == 2400.0
        assert by_mode[1]["concurrency"] == 45.0
        # The home pose is parallel-singular for modes 2, 3, 4 and 8.
        for k in (2, 3, 4, 8):
            assert abs(by_mode[k]["margin"]) < 1e-9
        for k in (1, 5, 6, 7):
            assert by_mode[k]["margin"] > 1e-3

    def test_mode_filter(self):
        result = run(["sing", "eval", "--pose", *HOME, "--mode", "6"])
        entries = result.record["modes"]
        assert len(entries) == 1 and entries[0]["mode"] == 6


class TestSingSurface:
    def test_writes_all_outputs(self, tmp_path):
        obj = tmp_path / "m1.obj"
        csv = tmp_path / "m1.csv"
        result = run(
            [
                "sing",
                "surface",
                "--mode",
                "1",
                "--resolution",
                "17",
                "--obj",
                str(obj),
                "--csv",
                str(csv),
                "--projections",
                str(tmp_path / "m1"),
            ]
        )
        assert result.code == 0
        assert obj.exists() and csv.exists()
        for suffix in ("xy", "xalpha", "yalpha"):
            assert (tmp_path / f"m1-{suffix}.csv").exists()
        v_lines = sum(1 for ln in obj.read_text().splitlines() if ln.startswith("v "))
        f_lines = sum(1 for ln in obj.read_text().splitlines() if ln.startswith("f "))
        assert v_lines == result.record["vertices"]
        assert f_lines == result.record["faces"]
        csv_rows = csv.read_text().splitlines()
        assert csv_rows[0] == "x,y,alpha,mode"
        assert len(csv_rows) == result.record["vertices"] + 1

    def test_deterministic_reruns(self, tmp_path):
        args = ["sing", "surface", "--mode", "8", "--resolution", "13", "--obj"]
        a, b = tmp_path / "a.obj", tmp_path / "b.obj"
        run(args + [str(a)])
        run(args + [str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_clip_reduces_vertex_count(self, tmp_path):
        base = ["sing", "surface", "--mode", "1", "--resolution", "17"]
        full = run(base)
        clipped = run(base + ["--clip"])
        assert clipped.record["vertices"] <= full.record["vertices"]
        assert clipped.record["clip"] is True

    def test_bad_box_is_domain_error(self):
        result = run(
            ["sing", "surface", "--mode", "1", "--box", "10", "0", "0", "90", "-1", "1"]
        )
        assert result.code == 1


class TestWorkspace:
    def test_check_inside(self):
        result = run(["workspace", "check", "--pose", *HOME])
        assert result.code == 0
        assert result.record["inside"] is True
        assert result.record["violations"] == []

    def test_check_outside_still_exits_zero(self):
        result = run(["workspace", "check", "--pose", "45", "25.980762113533", str(math.pi)])
        assert result.code == 0
        assert result.record["inside"] is False
        assert [1, "r_max"] in result.record["violations"]

    def test_mesh_counts_match_files(self, tmp_path):
        obj = tmp_path / "ws.obj"
        result = run(["workspace", "mesh", "--resolution", "15", "--obj", str(obj)])
        assert result.code == 0
        counts = result.record["label_counts"]
        assert set(counts) == {"10", "11", "20", "21", "30", "31"}
        assert sum(counts.values()) == result.record["vertices"]
        v_lines = sum(1 for ln in obj.read_text().splitlines() if ln.startswith("v "))
        assert v_lines == result.record["vertices"]

    def test_regular_sizing(self):
        result = run(
            ["workspace", "regular", "--rw", "25", "--alpha", "-1.5707963267948966", "1.5707963267948966"]
        )
        assert result.code == 0
        assert result.record["rho_min_req"] == pytest.approx(9.64101615138, rel=1e-9)
        assert result.record["rho_max_req"] == pytest.approx(79.7722557505, rel=1e-9)
        assert result.record["reachable"] is True
        assert "oracle" not in result.record

    def test_regular_sizing_degrees(self):
        rad = run(["workspace", "regular", "--rw", "25", "--alpha", "-1.5707963267948966", "1.5707963267948966"])
        deg = run(["workspace", "regular", "--rw", "25", "--alpha", "-90", "90", "--deg"])
        assert deg.record["rho_min_req"] == rad.record["rho_min_req"]
        assert deg.record["rho_max_req"] == rad.record["rho_max_req"]

    def test_regular_with_oracle(self):
        result = run(
            [
                "workspace",
                "regular",
                "--rw",
                "25",
                "--alpha",
                "-1.5707963267948966",
                "1.5707963267948966",
                "--oracle",
                "--oracle-resolution",
                "41",
            ]
        )
        assert result.code == 0
        oracle = result.record["oracle"]
        assert abs(oracle["rho_min_req"] - result.record["rho_min_req"]) <= oracle["grid_bound"]
        assert abs(oracle["rho_max_req"] - result.record["rho_max_req"]) <= oracle["grid_bound"]


class TestScissor:
    def test_design(self):
        result = run(["scissor", "design", "--rmin", "9", "--rmax", "80", "--n", "2"])
        assert result.code == 0
        assert result.record["h"] == 4.5
        assert result.record["l"] == pytest.approx(40.2523291252, rel=1e-11)
        assert result.record["feasible"] is True

    def test_design_infeasible(self):
        result = run(["scissor", "design", "--rmin", "30", "--rmax", "31", "--n", "1"])
        assert result.code == 1
        assert "scissor" in result.err

    def test_length_forward_and_inverse(self):
        fwd = run(["scissor", "length", "--n", "2", "--h", "4.5", "--l", "40.0", "--mu", "20"])
        assert fwd.code == 0
        rho = fwd.record["rho"]
        inv = run(["scissor", "length", "--n", "2", "--h", "4.5", "--l", "40.0", "--rho", str(rho)])
        assert inv.code == 0
        assert inv.record["mu"] == pytest.approx(20.0, rel=1e-9)

    def test_length_needs_exactly_one_input(self):
        base = ["scissor", "length", "--n", "2", "--h", "4.5", "--l", "40.0"]
        assert run(base).code == 2
        assert run(base + ["--mu", "10", "--rho", "30"]).code == 2

    def test_length_out_of_range(self):
        result = run(["scissor", "length", "--n", "2", "--h", "4.5", "--l", "40.0", "--mu", "100"])
        assert result.code == 1


class TestPlan:
    RADIAL = "x,y,alpha\n45,25.980762113533,0\n85,25.980762113533,0\n"

    def _run_plan(self, tmp_path, extra=()):
        path = tmp_path / "path.csv"
        path.write_text(self.RADIAL)
        out = tmp_path / "plan.csv"
        result = run(
            ["plan", "--path", str(path), "--step", "0.5", "--rmin", "9", "--rmax", "80", "--out", str(out)]
            + list(extra)
        )
        return result, out

    def test_radial_plan(self, tmp_path):
        result, out = self._run_plan(tmp_path)
        assert result.code == 0
        rec = result.record
        assert rec["feasible"] is True
        assert rec["n_samples"] == 81
        assert rec["switch_count"] <= 2
        assert rec["worst_margin"] >= rec["margin_threshold"]
        assert rec["validation"]["ok"] is True
        segments = rec["segments"]
        assert segments[0][1] == 0 and segments[-1][2] == 80
        lines = out.read_text().splitlines()
        assert lines[0] == "s,x,y,alpha,mode,margin"
        assert len(lines) == 82

    def test_plan_outside_workspace_fails(self, tmp_path):
        path = tmp_path / "path.csv"
        path.write_text(self.RADIAL)
        result = run(["plan", "--path", str(path), "--step", "0.5"])
        assert result.code == 1
        assert "workspace" in result.err

    def test_plan_missing_file(self, tmp_path):
        result = run(["plan", "--path", str(tmp_path / "nope.csv")])
        assert result.code == 1

    def test_degrees_waypoints(self, tmp_path):
        path = tmp_path / "path.csv"
        path.write_text("x,y,alpha\n45,25.980762113533,0\n45,25.980762113533,30\n")
        result = run(["plan", "--path", str(path), "--step", "1", "--step-alpha", "5", "--deg"])
        assert result.code == 0
        assert result.record["feasible"] is True
        # 30 degrees at 5-degree steps: 7 samples.
        assert result.record["n_samples"] == 7


class TestConfig:
    def test_config_file(self, tmp_path):
        cfg = tmp_path / "geom.cfg"
        cfg.write_text("r_min = 9\nr_max = 80\n")
        result = run(["workspace", "check", "--pose", "85", "25.980762113533", "0", "--config", str(cfg)])
        assert result.code == 0
        assert result.record["geometry"]["r_max"] == 80.0
        assert result.record["inside"] is True

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "geom.cfg"
        cfg.write_text("r_min = 9\nr_max = 80\n")
        result = run(
            ["workspace", "check", "--pose", "85", "25.980762113533", "0", "--config", str(cfg), "--rmax", "59"]
        )
        assert result.record["geometry"]["r_max"] == 59.0
        assert result.record["inside"] is False

    def test_unknown_key_is_domain_error(self, tmp_path):
        cfg = tmp_path / "geom.cfg"
        cfg.write_text("nonsense = 12\n")
        result = run(["ik", "--pose", *HOME, "--config", str(cfg)])
        assert result.code == 1
        assert "nonsense" in result.err

    def test_missing_config_file(self, tmp_path):
        result = run(["ik", "--pose", *HOME, "--config", str(tmp_path / "nope.cfg")])
        assert result.code == 1

    def test_noncanonical_geometry_rejected_for_singularity(self):
        result = run(["sing", "eval", "--pose", *HOME, "--base-side", "80"])
        assert result.code == 1
        assert "canonical" in result.err.lower()
