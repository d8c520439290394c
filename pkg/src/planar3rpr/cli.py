"""Command-line interface.

Every subcommand prints one JSON record (sorted keys, two-space indent, all
floats at 12 significant digits) so repeated invocations are byte-identical;
file-producing subcommands additionally write OBJ/CSV artifacts and list them
in the record. Exit codes: 0 success, 1 domain error, 2 usage error. Angles
are radians unless ``--deg`` is given, which converts the command's angular
inputs; outputs are always radians.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .errors import RobotModelError
from .geometry import ActuationMode, Pose, RobotGeometry, JointState, mode_table
from .kinematics import (
    forward_kinematics_sensors,
    inverse_kinematics,
    jacobians,
    normalized_margin,
)
from .mesh import mesh_projections, write_obj, write_points_csv, write_projection_csv
from .planner import discretize, plan_modes, read_path_csv, validate_plan, write_plan_csv
from .scissor import ScissorDesign, design_scissor, scissor_length, shaft_position
from .singularity import extract_surface, line_concurrency_residual, singularity_value
from .workspace import (
    RegularWorkspaceSpec,
    contains,
    default_workspace_box,
    regular_workspace_oracle,
    regular_workspace_requirements,
    workspace_mesh,
)

SCHEMA = "planar3rpr/1"


@dataclass(frozen=True)
class CommandResult:
    """Outcome of one CLI invocation."""

    code: int  # 0 ok, 1 domain error, 2 usage error
    out: str  # human-readable stdout (the JSON record, or help text)
    err: str  # stderr (error message, or usage text)
    record: Optional[dict] = None  # machine-readable payload


def _sig12(value: float) -> float:
    return float(f"{value:.12g}")


def _json_ready(obj):
    """Recursively convert to JSON-serializable data, floats at 12 digits."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _sig12(float(obj))
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def _dump(record: dict) -> str:
    return json.dumps(_json_ready(record), sort_keys=True, indent=2)


def _geometry_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("geometry", "robot dimensions (defaults, config file, flags)")
    g.add_argument("--config", metavar="FILE", help="key=value geometry file")
    g.add_argument("--base-side", type=float, metavar="L", help="base triangle side")
    g.add_argument("--platform-side", type=float, metavar="L", help="platform triangle side")
    g.add_argument("--epsilon", type=float, metavar="A", help="platform shape angle")
    g.add_argument("--rmin", type=float, metavar="R", help="minimum leg length")
    g.add_argument("--rmax", type=float, metavar="R", help="maximum leg length")
    g.add_argument("--scissor-n", type=int, metavar="N", help="scissor stage count")
    return p


def _deg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument(
        "--deg",
        action="store_true",
        help="interpret this command's angle inputs as degrees",
    )
    return p


def _geometry_from(args) -> RobotGeometry:
    geom = (
        RobotGeometry.from_config(args.config)
        if getattr(args, "config", None)
        else RobotGeometry()
    )
    overrides = {}
    for flag, key in (
        ("base_side", "base_side"),
        ("platform_side", "platform_side"),
        ("epsilon", "epsilon"),
        ("rmin", "r_min"),
        ("rmax", "r_max"),
        ("scissor_n", "scissor_n"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if "epsilon" in overrides and getattr(args, "deg", False):
        overrides["epsilon"] = math.radians(overrides["epsilon"])
    return geom.replace(**overrides) if overrides else geom


def _angle(value: float, args) -> float:
    return math.radians(value) if getattr(args, "deg", False) else float(value)


def _pose_from(args) -> Pose:
    x, y, alpha = args.pose
    return Pose(x, y, _angle(alpha, args))


def _box_from(args, geom) -> tuple:
    if args.box is None:
        return default_workspace_box(geom)
    x0, x1, y0, y1, a0, a1 = args.box
    return ((x0, x1), (y0, y1), (_angle(a0, args), _angle(a1, args)))


def _pose_dict(pose: Pose) -> dict:
    return {"x": pose.x, "y": pose.y, "alpha": pose.alpha}


def _base_record(command: str, geom: Optional[RobotGeometry]) -> dict:
    record = {"schema": SCHEMA, "command": command}
    if geom is not None:
        record["geometry"] = geom.to_dict()
    return record


def _cmd_ik(args) -> dict:
    geom = _geometry_from(args)
    pose = _pose_from(args)
    joints = inverse_kinematics(geom, pose)
    record = _base_record("ik", geom)
    record.update(
        pose=_pose_dict(pose),
        theta=list(joints.theta),
        rho=list(joints.rho),
    )
    return record


def _cmd_fk(args) -> dict:
    geom = _geometry_from(args)
    theta = [_angle(v, args) for v in args.theta]
    joints = JointState(theta=tuple(theta), rho=tuple(args.rho))
    pose, residual = forward_kinematics_sensors(geom, joints, tol_fk=args.tol)
    record = _base_record("fk", geom)
    record.update(
        theta=list(joints.theta),
        rho=list(joints.rho),
        pose=_pose_dict(pose),
        residual=residual,
    )
    return record


def _cmd_jacobian(args) -> dict:
    geom = _geometry_from(args)
    pose = _pose_from(args)
    mode = ActuationMode.from_index(args.mode)
    jac = jacobians(geom, pose, mode)
    record = _base_record("jacobian", geom)
    record.update(
        pose=_pose_dict(pose),
        mode=mode.index,
        drive="".join(mode.per_leg),
        A=jac.A.tolist(),
        B=jac.B.tolist(),
        det_A=float(np.linalg.det(jac.A)),
        det_B=float(np.linalg.det(jac.B)),
        margin=normalized_margin(jac),
        margin_signed=normalized_margin(jac, signed=True),
    )
    return record


def _sing_entry(geom, pose, index) -> dict:
    mode = ActuationMode.from_index(index)
    jac = jacobians(geom, pose, mode)
    return {
        "mode": mode.index,
        "drive": "".join(mode.per_leg),
        "value": singularity_value(geom, mode, pose),
        "margin": normalized_margin(jac),
        "concurrency": line_concurrency_residual(geom, pose, mode),
    }


def _cmd_sing_eval(args) -> dict:
    geom = _geometry_from(args)
    pose = _pose_from(args)
    indices = [args.mode] if args.mode else range(1, 9)
    record = _base_record("sing eval", geom)
    record.update(
        pose=_pose_dict(pose),
        modes=[_sing_entry(geom, pose, i) for i in indices],
    )
    return record


def _mesh_outputs(mesh, args) -> dict:
    files = []
    if args.obj:
        write_obj(mesh, args.obj)
        files.append(args.obj)
    if args.csv:
        write_points_csv(mesh, args.csv)
        files.append(args.csv)
    if args.projections:
        columns = {"xy": ("x", "y"), "xalpha": ("x", "alpha"), "yalpha": ("y", "alpha")}
        for name, points in mesh_projections(mesh).items():
            path = f"{args.projections}-{name}.csv"
            write_projection_csv(points, columns[name], path)
            files.append(path)
    return {
        "vertices": int(mesh.vertices.shape[0]),
        "faces": int(mesh.faces.shape[0]),
        "files": files,
    }


def _cmd_sing_surface(args) -> dict:
    geom = _geometry_from(args)
    mode = ActuationMode.from_index(args.mode)
    box = _box_from(args, geom)
    mesh = extract_surface(
        geom, mode, box, args.resolution, clip=args.clip, mesh_tol=args.mesh_tol
    )
    record = _base_record("sing surface", geom)
    record.update(
        mode=mode.index,
        box=[list(r) for r in box],
        resolution=args.resolution,
        clip=bool(args.clip),
        **_mesh_outputs(mesh, args),
    )
    return record


def _cmd_workspace_check(args) -> dict:
    geom = _geometry_from(args)
    pose = _pose_from(args)
    report = contains(geom, pose)
    record = _base_record("workspace check", geom)
    record.update(
        pose=_pose_dict(pose),
        inside=report.inside,
        rho=list(report.rho),
        violations=[[leg, bound] for leg, bound in report.violations],
    )
    return record


def _cmd_workspace_mesh(args) -> dict:
    geom = _geometry_from(args)
    box = _box_from(args, geom)
    mesh = workspace_mesh(geom, box, args.resolution, mesh_tol=args.mesh_tol)
    labels, counts = np.unique(mesh.labels, return_counts=True)
    record = _base_record("workspace mesh", geom)
    record.update(
        box=[list(r) for r in box],
        resolution=args.resolution,
        label_counts={str(int(l)): int(c) for l, c in zip(labels, counts)},
        **_mesh_outputs(mesh, args),
    )
    return record


def _cmd_workspace_regular(args) -> dict:
    geom = _geometry_from(args)
    alpha_min, alpha_max = (_angle(v, args) for v in args.alpha)
    spec = RegularWorkspaceSpec(
        r_w=args.rw,
        alpha_min=alpha_min,
        alpha_max=alpha_max,
        center=tuple(args.center) if args.center else None,
    )
    req = regular_workspace_requirements(geom, spec)
    record = _base_record("workspace regular", geom)
    record.update(
        r_w=spec.r_w,
        alpha_min=spec.alpha_min,
        alpha_max=spec.alpha_max,
        center=list(spec.resolved_center(geom)),
        rho_min_req=req.rho_min_req,
        rho_max_req=req.rho_max_req,
        reachable=req.reachable,
        per_leg=[list(pair) for pair in req.per_leg],
    )
    if args.oracle:
        oracle = regular_workspace_oracle(geom, spec, resolution=args.oracle_resolution)
        record["oracle"] = {
            "rho_min_req": oracle.rho_min_req,
            "rho_max_req": oracle.rho_max_req,
            "grid_bound": oracle.grid_bound,
            "resolution": args.oracle_resolution,
        }
    return record


def _cmd_scissor_design(args) -> dict:
    design = design_scissor(args.rmin, args.rmax, args.n)
    record = _base_record("scissor design", None)
    record.update(
        n=design.n,
        h=design.h,
        l=design.l,
        feasible=design.feasible,
        rho_min=design.rho_min,
        rho_max=design.rho_max,
        mu_min=design.mu_min,
        mu_max=design.mu_max,
    )
    return record


def _cmd_scissor_length(args) -> dict:
    design = ScissorDesign(n=args.n, h=args.h, l=args.l)
    record = _base_record("scissor length", None)
    record.update(n=design.n, h=design.h, l=design.l)
    if args.mu is not None:
        record["mu"] = args.mu
        record["rho"] = scissor_length(args.mu, design)
    else:
        record["rho"] = args.rho
        record["mu"] = shaft_position(args.rho, design)
    return record


def _cmd_plan(args) -> dict:
    geom = _geometry_from(args)
    degrees = bool(getattr(args, "deg", False))
    waypoints = read_path_csv(args.path, degrees=degrees)
    step_alpha = args.step_alpha
    if degrees and step_alpha is not None:
        step_alpha = math.radians(step_alpha)
    samples = discretize(geom, waypoints, args.step, step_alpha)
    plan = plan_modes(
        geom, samples, margin_threshold=args.threshold, switch_penalty=args.penalty
    )
    record = _base_record("plan", geom)
    record.update(
        n_samples=len(samples),
        margin_threshold=args.threshold,
        switch_penalty=args.penalty,
        feasible=plan.feasible,
    )
    if not plan.feasible:
        record["blocking"] = list(plan.blocking)
        return record
    segments = []
    start = 0
    for j in range(1, len(plan.modes) + 1):
        if j == len(plan.modes) or plan.modes[j] != plan.modes[start]:
            segments.append([plan.modes[start], start, j - 1])
            start = j
    report = validate_plan(geom, samples, plan)
    record.update(
        modes=list(plan.modes),
        switch_count=plan.switch_count,
        switches=list(plan.switches),
        worst_margin=min(plan.margins),
        segments=segments,
        validation={
            "ok": report.ok,
            "worst_margin": report.worst_margin,
            "switch_count": report.switch_count,
            "discrepancies": list(report.discrepancies),
        },
    )
    if args.out:
        write_plan_csv(args.out, samples, plan)
        record["files"] = [args.out]
    return record


def build_parser() -> argparse.ArgumentParser:
    geo = _geometry_parser()
    deg = _deg_parser()
    parser = argparse.ArgumentParser(
        prog="planar3rpr",
        description=(
            "Kinematics, singularity, workspace and actuation-mode planning for a "
            "variable-actuation 3-RPR planar parallel robot with scissor-driven legs."
        ),
        epilog=(
            "Output is one JSON record per invocation (12 significant digits). "
            "File formats are documented in FORMATS.md: path CSV (header x,y,alpha), "
            "plan CSV (s,x,y,alpha,mode,margin), mesh OBJ ('v x y alpha' vertices, "
            "1-based 'f i j k' faces), mesh point CSV (x,y,alpha,mode), and the "
            "geometry config file (key=value lines: base_side, platform_side, "
            "epsilon, r_min, r_max, scissor_n)."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser(
        "ik", parents=[geo, deg], help="inverse kinematics: pose -> joint values"
    )
    p.add_argument("--pose", type=float, nargs=3, metavar=("X", "Y", "ALPHA"), required=True)
    p.set_defaults(func=_cmd_ik)

    p = sub.add_parser(
        "fk", parents=[geo, deg], help="forward kinematics from sensed theta and rho"
    )
    p.add_argument("--theta", type=float, nargs=3, metavar=("T1", "T2", "T3"), required=True)
    p.add_argument("--rho", type=float, nargs=3, metavar=("R1", "R2", "R3"), required=True)
    p.add_argument("--tol", type=float, default=None, help="sensor consistency tolerance")
    p.set_defaults(func=_cmd_fk)

    p = sub.add_parser(
        "jacobian", parents=[geo, deg], help="direct/inverse Jacobians of a mode at a pose"
    )
    p.add_argument("--pose", type=float, nargs=3, metavar=("X", "Y", "ALPHA"), required=True)
    p.add_argument("--mode", type=int, choices=range(1, 9), required=True)
    p.set_defaults(func=_cmd_jacobian)

    p = sub.add_parser("sing", help="parallel-singularity analysis")
    sing_sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    q = sing_sub.add_parser(
        "eval",
        parents=[geo, deg],
        help="closed-form value, margin and line test at a pose",
    )
    q.add_argument("--pose", type=float, nargs=3, metavar=("X", "Y", "ALPHA"), required=True)
    q.add_argument("--mode", type=int, choices=range(1, 9), help="restrict to one mode")
    q.set_defaults(func=_cmd_sing_eval)
    q = sing_sub.add_parser(
        "surface", parents=[geo, deg], help="mesh the singularity surface of a mode"
    )
    q.add_argument("--mode", type=int, choices=range(1, 9), required=True)
    q.add_argument(
        "--box",
        type=float,
        nargs=6,
        metavar=("X0", "X1", "Y0", "Y1", "A0", "A1"),
        help="extraction box (default: a box containing the workspace)",
    )
    q.add_argument("--resolution", type=int, default=65, help="grid nodes per axis")
    q.add_argument("--clip", action="store_true", help="drop cells outside the workspace")
    q.add_argument("--mesh-tol", type=float, default=1e-6, help="vertex residual target")
    q.add_argument("--obj", metavar="FILE", help="write mesh as OBJ")
    q.add_argument("--csv", metavar="FILE", help="write vertices as CSV x,y,alpha,mode")
    q.add_argument("--projections", metavar="PREFIX", help="write PREFIX-{xy,xalpha,yalpha}.csv")
    q.set_defaults(func=_cmd_sing_surface)

    p = sub.add_parser("workspace", help="workspace membership, boundary, sizing")
    ws_sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    q = ws_sub.add_parser("check", parents=[geo, deg], help="is a pose inside the workspace?")
    q.add_argument("--pose", type=float, nargs=3, metavar=("X", "Y", "ALPHA"), required=True)
    q.set_defaults(func=_cmd_workspace_check)
    q = ws_sub.add_parser("mesh", parents=[geo, deg], help="mesh the workspace boundary")
    q.add_argument(
        "--box", type=float, nargs=6, metavar=("X0", "X1", "Y0", "Y1", "A0", "A1")
    )
    q.add_argument("--resolution", type=int, default=65, help="grid nodes per axis")
    q.add_argument("--mesh-tol", type=float, default=1e-6, help="vertex residual target")
    q.add_argument("--obj", metavar="FILE", help="write mesh as OBJ")
    q.add_argument("--csv", metavar="FILE", help="write vertices as CSV x,y,alpha,mode")
    q.add_argument("--projections", metavar="PREFIX", help="write PREFIX-{xy,xalpha,yalpha}.csv")
    q.set_defaults(func=_cmd_workspace_mesh)
    q = ws_sub.add_parser(
        "regular",
        parents=[geo, deg],
        help="joint ranges required by a disc of poses over a tilt range",
    )
    q.add_argument("--rw", type=float, required=True, help="disc radius")
    q.add_argument(
        "--alpha",
        type=float,
        nargs=2,
        metavar=("MIN", "MAX"),
        default=[-math.pi, math.pi],
        help="tilt range (default: full turn)",
    )
    q.add_argument("--center", type=float, nargs=2, metavar=("X", "Y"))
    q.add_argument("--oracle", action="store_true", help="cross-check on a dense grid")
    q.add_argument("--oracle-resolution", type=int, default=201)
    q.set_defaults(func=_cmd_workspace_regular)

    p = sub.add_parser("scissor", help="scissor-leg design and length maps")
    sc_sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")
    q = sc_sub.add_parser("design", help="size a scissor for a required stroke")
    q.add_argument("--rmin", type=float, required=True, help="required minimum length")
    q.add_argument("--rmax", type=float, required=True, help="required maximum length")
    q.add_argument("--n", type=int, default=1, help="stage count")
    q.set_defaults(func=_cmd_scissor_design)
    q = sc_sub.add_parser("length", help="map shaft position mu <-> leg length rho")
    q.add_argument("--n", type=int, required=True, help="stage count")
    q.add_argument("--h", type=float, required=True, help="shaft clearance")
    q.add_argument("--l", type=float, required=True, help="link length")
    group = q.add_mutually_exclusive_group(required=True)
    group.add_argument("--mu", type=float, help="shaft position")
    group.add_argument("--rho", type=float, help="leg length")
    q.set_defaults(func=_cmd_scissor_length)

    p = sub.add_parser(
        "plan", parents=[geo, deg], help="assign actuation modes along a path"
    )
    p.add_argument("--path", required=True, metavar="FILE", help="waypoint CSV (x,y,alpha)")
    p.add_argument("--step", type=float, default=1.0, help="max position step")
    p.add_argument("--step-alpha", type=float, default=None, help="max tilt step (radians)")
    p.add_argument("--threshold", type=float, default=1e-3, help="minimum margin")
    p.add_argument("--penalty", type=float, default=1.0, help="cost per mode switch")
    p.add_argument("--out", metavar="FILE", help="write plan CSV s,x,y,alpha,mode,margin")
    p.set_defaults(func=_cmd_plan)

    return parser


def run(argv) -> CommandResult:
    """Execute one CLI invocation without printing or exiting."""
    parser = build_parser()
    out_buf, err_buf = io.StringIO(), io.StringIO()
    try:
        with redirect_stdout(out_buf), redirect_stderr(err_buf):
            args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = 0 if exc.code in (0, None) else 2
        return CommandResult(code=code, out=out_buf.getvalue(), err=err_buf.getvalue())
    try:
        record = args.func(args)
    except RobotModelError as exc:
        return CommandResult(code=1, out="", err=f"error: {exc}")
    except OSError as exc:
        return CommandResult(code=1, out="", err=f"error: {exc}")
    record = _json_ready(record)
    return CommandResult(code=0, out=_dump(record), err="", record=record)


def main(argv=None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    if result.out:
        sys.stdout.write(result.out if result.out.endswith("\n") else result.out + "\n")
    if result.err:
        sys.stderr.write(result.err if result.err.endswith("\n") else result.err + "\n")
    return result.code


if __name__ == "__main__":
    sys.exit(main())
