"""Acceptance suite: nine end-to-end checks, one summary line each.

Each test prints "[criterion N] PASS/FAIL - detail" (also echoed in the
terminal summary via conftest.py) and then asserts, so a red run still shows
every criterion's outcome and measured numbers.
"""

import math
import time

import numpy as np

from planar3rpr import (
    ModePlan,
    Pose,
    RegularWorkspaceSpec,
    RobotGeometry,
    bisect_root,
    bracket_roots,
    contains,
    contains_mask,
    design_scissor,
    discretize,
    forward_kinematics_sensors,
    inverse_kinematics,
    jacobians,
    leg_lengths,
    line_concurrency_residuals,
    normalized_margin,
    plan_modes,
    regular_workspace_oracle,
    regular_workspace_requirements,
    singularity_values,
    transmission_margins,
    validate_plan,
    workspace_mesh,
)

R3 = math.sqrt(3.0)
GEOM = RobotGeometry()
HOME = Pose(45.0, 15.0 * R3, 0.0)

# Sampling box generously covering the reachable region.
X_RANGE = (-25.0, 115.0)
Y_RANGE = (-40.0, 120.0)

CRITERIA_STARTED = set()
CRITERIA_RESULTS = {}


def _start(n):
    CRITERIA_STARTED.add(n)


def _report(n, ok, detail):
    CRITERIA_RESULTS[n] = (bool(ok), detail)
    line = f"[criterion {n}] {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def _random_poses(rng, count):
    xs = rng.uniform(*X_RANGE, count)
    ys = rng.uniform(*Y_RANGE, count)
    als = rng.uniform(-math.pi, math.pi, count)
    return xs, ys, als


def test_criterion_1_regular_workspace_sizing():
    _start(1)
    spec = RegularWorkspaceSpec(r_w=25.0, alpha_min=-math.pi / 2.0, alpha_max=math.pi / 2.0)
    t0 = time.perf_counter()
    req = regular_workspace_requirements(GEOM, spec)
    oracle = regular_workspace_oracle(GEOM, spec, resolution=201)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(req.rho_min_req - 9.64) <= 0.05
        and abs(req.rho_max_req - 79.77) <= 0.05
        and abs(req.rho_min_req - oracle.rho_min_req) <= oracle.grid_bound
        and abs(req.rho_max_req - oracle.rho_max_req) <= oracle.grid_bound
        and elapsed < 10.0
    )
    _report(
        1,
        ok,
        f"rho_min_req={req.rho_min_req:.6f} rho_max_req={req.rho_max_req:.6f}, "
        f"oracle@201^3 within grid bound {oracle.grid_bound:.3f}, {elapsed:.2f}s",
    )


def test_criterion_2_scissor_design_family():
    _start(2)
    l_exact = math.sqrt(6481.0)
    worst = 0.0
    feasible = True
    for n in range(1, 7):
        design = design_scissor(9.0, 80.0, n)
        worst = max(
            worst,
            abs(design.h - 9.0 / n) / (9.0 / n),
            abs(design.l - l_exact / n) / (l_exact / n),
        )
        feasible = feasible and design.feasible and design.l > 3.0 * design.h
    ok = worst <= 1e-12 and feasible
    _report(2, ok, f"n=1..6: h=9/n, l=sqrt(6481)/n to {worst:.2e} relative; l>3h holds")


def test_criterion_3_boundary_identity():
    _start(3)
    from planar3rpr import boundary_values

    rng = np.random.default_rng(2024)
    n = 10_000
    xs, ys, als = _random_poses(rng, n)
    rho = leg_lengths(GEOM, xs, ys, als)
    worst = 0.0
    for leg in (1, 2, 3):
        for r in (8.0, 25.0, 59.0):
            s = boundary_values(GEOM, leg, xs, ys, als, r)
            worst = max(worst, float(np.max(np.abs(s - (rho[:, leg - 1] ** 2 - r * r)))))
    ok = worst <= 1e-9
    _report(3, ok, f"max |s_i - (rho_i^2 - r^2)| = {worst:.2e} over {n} poses x 3 legs x 3 radii")


def test_criterion_4_singular_planes():
    _start(4)
    rng = np.random.default_rng(4)
    planes = [
        (1, math.acos(1.0 / 3.0)),
        (1, -math.acos(1.0 / 3.0)),
        (8, 0.0),
        (8, math.pi),
    ]
    worst = 0.0
    for mode, alpha in planes:
        kept = 0
        while kept < 1000:
            m = 2000
            xs = rng.uniform(*X_RANGE, m)
            ys = rng.uniform(*Y_RANGE, m)
            als = np.full(m, alpha)
            rho = leg_lengths(GEOM, xs, ys, als)
            good = np.min(rho, axis=1) > 1e-6  # skip serial singularities
            margins = transmission_margins(GEOM, xs[good], ys[good], als[good], mode)
            take = min(margins.size, 1000 - kept)
            if take:
                worst = max(worst, float(np.max(margins[:take])))
            kept += take
    ok = worst <= 1e-9
    _report(4, ok, f"mode-1 alpha=+/-arccos(1/3) and mode-8 alpha=0,pi: max margin {worst:.2e} at 1000 pts/plane")


def test_criterion_5_zero_set_agreement():
    _start(5)
    rng = np.random.default_rng(5)
    worst_margin = 0.0  # |margin| at polynomial roots
    worst_poly = 0.0  # normalized |poly| at margin roots
    worst_conc = 0.0  # |line concurrency| at polynomial roots
    n_roots = 0

    for mode in range(1, 9):
        for _ in range(200):
            p0 = np.array([rng.uniform(*X_RANGE), rng.uniform(*Y_RANGE), rng.uniform(-math.pi, math.pi)])
            p1 = np.array([rng.uniform(*X_RANGE), rng.uniform(*Y_RANGE), rng.uniform(-math.pi, math.pi)])

            def poly_f(ts, p0=p0, p1=p1, mode=mode):
                ts = np.asarray(ts, dtype=float)
                pts = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
                return singularity_values(GEOM, mode, pts[:, 0], pts[:, 1], pts[:, 2])

            def margin_f(ts, p0=p0, p1=p1, mode=mode):
                ts = np.asarray(ts, dtype=float)
                pts = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
                return transmission_margins(GEOM, pts[:, 0], pts[:, 1], pts[:, 2], mode, signed=True)

            def conc_f(ts, p0=p0, p1=p1, mode=mode):
                ts = np.asarray(ts, dtype=float)
                pts = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
                return line_concurrency_residuals(GEOM, mode, pts[:, 0], pts[:, 1], pts[:, 2])

            scale = max(1.0, float(np.max(np.abs(poly_f(np.array([0.0, 1.0]))))))

            for a, b in bracket_roots(poly_f, 0.0, 1.0):
                t = bisect_root(poly_f, a, b, tol=1e-13)
                m = float(margin_f(np.array([t]))[0])
                c = float(conc_f(np.array([t]))[0])
                if math.isfinite(m):
                    worst_margin = max(worst_margin, abs(m))
                if math.isfinite(c):
                    worst_conc = max(worst_conc, abs(c))
                n_roots += 1

            for a, b in bracket_roots(margin_f, 0.0, 1.0):
                t = bisect_root(margin_f, a, b, tol=1e-13)
                worst_poly = max(worst_poly, abs(float(poly_f(np.array([t]))[0])) / scale)

    ok = worst_margin <= 1e-6 and worst_poly <= 1e-6 and worst_conc <= 1e-6
    _report(
        5,
        ok,
        f"{n_roots} roots over 200 segments x 8 modes: margin@poly-root {worst_margin:.2e}, "
        f"poly@margin-root {worst_poly:.2e}, concurrency@poly-root {worst_conc:.2e}",
    )


def test_criterion_6_ik_fk_roundtrip():
    _start(6)
    rng = np.random.default_rng(6)
    poses = []
    while len(poses) < 10_000:
        xs, ys, als = _random_poses(rng, 20_000)
        mask = contains_mask(GEOM, xs, ys, als)
        poses.extend(zip(xs[mask], ys[mask], als[mask]))
    poses = poses[:10_000]
    worst_pos = 0.0
    worst_ang = 0.0
    for x, y, a in poses:
        joints = inverse_kinematics(GEOM, Pose(x, y, a))
        fk_pose, _residual = forward_kinematics_sensors(GEOM, joints)
        worst_pos = max(worst_pos, abs(fk_pose.x - x), abs(fk_pose.y - y))
        worst_ang = max(worst_ang, abs(math.remainder(fk_pose.alpha - a, math.tau)))
    ok = worst_pos <= 1e-9 and worst_ang <= 1e-9
    _report(6, ok, f"10^4 in-workspace poses: max position error {worst_pos:.2e}, max angle error {worst_ang:.2e}")


def test_criterion_7_mode1_singular_circle():
    _start(7)
    center = np.array([45.0, 15.0 * R3])
    radius = 20.0 * R3
    worst = 0.0
    rays_with_root = 0
    for k in range(360):
        phi = 2.0 * math.pi * k / 360.0
        dx, dy = math.cos(phi), math.sin(phi)

        def ray_f(ts, dx=dx, dy=dy):
            ts = np.asarray(ts, dtype=float)
            return singularity_values(
                GEOM, 1, center[0] + ts * dx, center[1] + ts * dy, np.zeros_like(ts)
            )

        brackets = bracket_roots(ray_f, 5.0, 55.0)
        roots = [bisect_root(ray_f, a, b, tol=1e-12) for a, b in brackets]
        if roots:
            rays_with_root += 1
        for r in roots:
            worst = max(worst, abs(r - radius))
    ok = rays_with_root == 360 and worst <= 1e-6
    _report(
        7,
        ok,
        f"alpha=0 zero set on 360 rays from (45, 15*sqrt(3)): {rays_with_root} hits, "
        f"max |r - 20*sqrt(3)| = {worst:.2e}",
    )


def test_criterion_8_planner_on_radial_path():
    _start(8)
    geom = RobotGeometry(r_min=9.0, r_max=80.0)
    samples = discretize(geom, [Pose(45.0, 15.0 * R3, 0.0), Pose(85.0, 15.0 * R3, 0.0)], step=0.5)
    plan = plan_modes(geom, samples, margin_threshold=1e-3, switch_penalty=1.0)
    report = validate_plan(geom, samples, plan)

    def mode8_margin(pose):
        try:
            return normalized_margin(jacobians(geom, pose, 8))
        except Exception:
            return 0.0

    pinned = ModePlan(
        modes=(8,) * len(samples),
        margins=tuple(mode8_margin(smp.pose) for smp in samples),
        switches=(),
        feasible=True,
        threshold=1e-3,
    )
    pinned_report = validate_plan(geom, samples, pinned)
    ok = (
        plan.feasible
        and min(plan.margins) >= 1e-3
        and plan.switch_count <= 2
        and report.ok
        and not pinned_report.ok
    )
    _report(
        8,
        ok,
        f"radial path: feasible={plan.feasible}, worst margin {min(plan.margins):.4f}, "
        f"{plan.switch_count} switch(es), validation ok={report.ok}; pinned mode-8 rejected={not pinned_report.ok}",
    )


def test_criterion_9_workspace_figure_data():
    _start(9)
    mesh = workspace_mesh(GEOM, resolution=33)
    inside_home = contains(GEOM, HOME).inside
    flipped = contains(GEOM, Pose(45.0, 15.0 * R3, math.pi)).inside
    ok = (not mesh.is_empty) and inside_home and not flipped
    _report(
        9,
        ok,
        f"r=[8,59] boundary mesh: {mesh.vertices.shape[0]} vertices; home inside={inside_home}, "
        f"(45, 15*sqrt(3), pi) inside={flipped}",
    )
