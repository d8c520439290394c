"""Parallel-singularity analysis: closed-form loci, line test, surface extraction.

For each actuation mode the parallel singularities det(A) = 0 admit a
closed-form trivariate polynomial in (x, y, cos alpha, sin alpha), valid for
the canonical dimensions (base 90, platform 30, epsilon = pi/3). The
polynomial route, the determinant route (normalized margin), and the
geometric line-concurrency route all vanish on the same set, which the test
suite cross-checks; the polynomials are the cheapest to sweep over grids.

Mode 1 factors into the planes cos(alpha) = 1/3 and a circle family; mode 8
factors into the planes sin(alpha) = 0 (both alpha = 0 and alpha = pi) and the
same circle family.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, SerialSingularityError
from .geometry import ActuationMode, Pose, RobotGeometry, platform_anchors_batch
from .kinematics import _as_mode
from .mesh import SurfaceMesh, isosurface

R3 = math.sqrt(3.0)


def _poly_mode1(x, y, c, s):
    return -3.0 * (-30.0 * R3 * y + x**2 + y**2 + 1800.0 * c - 90.0 * x - 300.0) * (c - 1.0 / 3.0)


def _poly_mode2(x, y, c, s):
    t = (
        40.0 * c**2 * x * y
        - 1800.0 * c**2 * y
        - 20.0 * c * s * x**2
        + 1800.0 * c * s * x
        + 20.0 * c * s * y**2
        - 81000.0 * c * s
        - 90.0 * c * x * y
        + 4050.0 * c * y
        - 90.0 * s * y**2
        + 13500.0 * s
        - 20.0 * x * y
        + 900.0 * y
    ) * R3
    t = t + (
        c * x**3
        - 135.0 * c * x**2
        + c * x * y**2
        + 3450.0 * c * x
        - 45.0 * c * y**2
        + 27000.0 * c
        + s * x**2 * y
        - 90.0 * s * x * y
        + s * y**3
        + 7500.0 * s * y
        + 2700.0 * x
        - 121500.0
    )
    return t


def _poly_mode3(x, y, c, s):
    t = (
        -160.0 * y * (x + 45.0) * c**2
        + ((80.0 * x**2 - 80.0 * y**2 + 7200.0 * x - 648000.0) * s
           - 4.0 * y * (x**2 + y**2 - 180.0 * x - 600.0)) * c
        + (4.0 * x**3 + 4.0 * x * y**2 - 720.0 * x**2 + 30000.0 * x + 108000.0) * s
        + 80.0 * y * (x - 90.0)
    ) * R3
    t = t + (-240.0 * x**2 + 240.0 * y**2 + 21600.0 * x) * c**2
    t = t + (
        -480.0 * y * (x - 45.0) * s
        - 4.0 * (x - 90.0) * (x**2 + y**2 - 180.0 * x - 600.0)
    ) * c
    t = t - 4.0 * y * (x**2 + y**2 - 180.0 * x + 7500.0) * s
    t = t + 120.0 * x**2 - 120.0 * y**2 - 21600.0 * x + 972000.0
    return t


def _poly_mode4(x, y, c, s):
    t = (
        -160.0 * y * (x - 135.0) * c**2
        + ((80.0 * x**2 - 80.0 * y**2 - 21600.0 * x + 648000.0) * s
           + 4.0 * x**2 * y + 4.0 * y**3 - 34800.0 * y) * c
        + (-4.0 * x**3 + 360.0 * x**2 + (-4.0 * y**2 + 2400.0) * x + 360.0 * y**2 - 108000.0) * s
        + 80.0 * x * y
    ) * R3
    t = t + (240.0 * x**2 - 240.0 * y**2 - 21600.0 * x) * c**2
    t = t + (480.0 * y * (x - 45.0) * s - 4.0 * x**3 - 4.0 * x * y**2 + 34800.0 * x) * c
    t = t + (-4.0 * x**2 * y - 4.0 * y**3 + 2400.0 * y) * s
    t = t - 120.0 * x**2 + 120.0 * y**2
    return t


def _poly_mode5(x, y, c, s):
    t = (
        -20.0 * c**2 * x**2
        + 5400.0 * c**2 * x
        + 20.0 * c**2 * y**2
        - 162000.0 * c**2
        - 40.0 * c * s * x * y
        + 5400.0 * c * s * y
        + c * x**3
        - 90.0 * c * x**2
        + c * x * y**2
        - 90.0 * c * y**2
        - 27000.0 * c
        + s * x**2 * y
        + s * y**3
        - 8100.0 * s * y
        - 2700.0 * x
        - 20.0 * y**2
        + 165000.0
    ) * R3
    t = t + (
        -120.0 * c**2 * x * y
        + 5400.0 * c**2 * y
        + 60.0 * c * s * x**2
        - 5400.0 * c * s * x
        - 60.0 * c * s * y**2
        + c * x**2 * y
        + c * y**3
        - s * x**3
        - s * x * y**2
        + 8100.0 * s * x
        + 60.0 * x * y
        - 2700.0 * y
    )
    return t


def _poly_mode6(x, y, c, s):
    t = (
        (80.0 * x**2 - 80.0 * y**2 - 7200.0 * x + 324000.0) * c**2
        + (160.0 * y * (x - 45.0) * s + 360.0 * y**2 - 54000.0) * c
        - 360.0 * y * (x - 45.0) * s
        - 60.0 * x**2 + 20.0 * y**2 + 5400.0 * x - 156000.0
    ) * R3
    t = t - 4.0 * y * (x**2 + y**2 - 90.0 * x + 8100.0) * c
    t = t + 4.0 * (x - 45.0) * (x**2 + y**2 - 90.0 * x) * s
    t = t + 5400.0 * y
    return t


def _poly_mode7(x, y, c, s):
    t = (
        480.0 * y * (x - 45.0) * c**2
        + ((-240.0 * x**2 + 240.0 * y**2 + 21600.0 * x) * s
           + 4.0 * y * (x**2 + y**2 - 180.0 * x + 8100.0)) * c
        - 4.0 * (x - 90.0) * (x**2 + y**2 - 180.0 * x) * s
        - 240.0 * y * (x - 45.0)
    ) * R3
    t = t + (1944000.0 - 240.0 * x**2 + 240.0 * y**2 - 21600.0 * x) * c**2
    t = t + (
        -480.0 * y * (x + 45.0) * s
        - 324000.0 - 12.0 * x**3 + 2160.0 * x**2 + (-12.0 * y**2 - 97200.0) * x
    ) * c
    t = t - 12.0 * y * (x**2 + y**2 - 180.0 * x) * s
    t = t - 240.0 * y**2 + 32400.0 * x - 936000.0
    return t


def _poly_mode8(x, y, c, s):
    return -s * (30.0 * R3 * y - x**2 - y**2 - 1800.0 * c + 90.0 * x + 300.0)


_POLYS = {
    1: _poly_mode1,
    2: _poly_mode2,
    3: _poly_mode3,
    4: _poly_mode4,
    5: _poly_mode5,
    6: _poly_mode6,
    7: _poly_mode7,
    8: _poly_mode8,
}


def singularity_values(geom: RobotGeometry, mode, xs, ys, alphas) -> np.ndarray:
    """Vectorized closed-form singularity polynomial for N poses, shape (N,)."""
    mode = _as_mode(mode)
    geom.require_canonical("the closed-form singularity polynomial")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    return _POLYS[mode.index](xs, ys, np.cos(alphas), np.sin(alphas))


def singularity_value(geom: RobotGeometry, mode, pose: Pose) -> float:
    """Closed-form singularity polynomial at one pose (zero iff singular)."""
    mode = _as_mode(mode)
    geom.require_canonical("the closed-form singularity polynomial")
    return float(
        _POLYS[mode.index](pose.x, pose.y, math.cos(pose.alpha), math.sin(pose.alpha))
    )


def line_concurrency_residuals(geom: RobotGeometry, mode, xs, ys, alphas) -> np.ndarray:
    """Vectorized geometric singularity test for N poses, shape (N,).

    Each leg contributes one line in Hesse normal form (n_x, n_y, c) with
    |n| = 1 and n.p + c = 0:

    * prismatic-actuated leg: the leg axis M_i through a_i and b_i;
    * revolute-actuated leg: the line L_i through b_i normal to the leg.

    The value is the 3x3 determinant of the stacked line coordinates, which is
    zero exactly when the three lines meet in a point or are all parallel —
    the geometric condition for a parallel singularity. Poses at a serial
    singularity (rho_i = 0) yield NaN (the leg has no direction).
    """
    mode = _as_mode(mode)
    b = platform_anchors_batch(geom, xs, ys, alphas)  # (N, 3, 2)
    d = b - geom.base_anchors[None, :, :]
    rows = np.empty(b.shape[:1] + (3, 3))
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(3):
            rho_i = np.hypot(d[:, i, 0], d[:, i, 1])
            if mode.revolute_active(i):
                # L_i: normal along the leg, through b_i.
                nx = d[:, i, 0] / rho_i
                ny = d[:, i, 1] / rho_i
                cc = -(nx * b[:, i, 0] + ny * b[:, i, 1])
            else:
                # M_i: the leg axis, through a_i (and b_i).
                nx = -d[:, i, 1] / rho_i
                ny = d[:, i, 0] / rho_i
                a_i = geom.base_anchors[i]
                cc = -(nx * a_i[0] + ny * a_i[1])
            rows[:, i, 0] = nx
            rows[:, i, 1] = ny
            rows[:, i, 2] = cc
        return np.linalg.det(rows)


def line_concurrency_residual(geom: RobotGeometry, pose: Pose, mode) -> float:
    """Geometric singularity test at one pose (see line_concurrency_residuals)."""
    value = line_concurrency_residuals(
        geom, mode, np.array([pose.x]), np.array([pose.y]), np.array([pose.alpha])
    )[0]
    if not math.isfinite(value):
        raise SerialSingularityError(0, 0.0)
    return float(value)


def bracket_roots(f, lo: float, hi: float, samples: int = 257):
    """Sign-change brackets of f on [lo, hi] from a uniform scan.

    Returns a list of (a, b) intervals with f(a) * f(b) < 0; an exact zero at a
    sample point is returned as the degenerate bracket (t, t). Roots of even
    multiplicity (no sign change) are not detected.
    """
    if not hi > lo:
        raise DomainError(f"need hi > lo, got [{lo}, {hi}]")
    if samples < 2:
        raise DomainError(f"need at least 2 samples, got {samples}")
    ts = np.linspace(lo, hi, samples)
    vals = np.asarray(f(ts), dtype=float)
    out = []
    for i in np.nonzero(vals == 0.0)[0]:
        out.append((float(ts[i]), float(ts[i])))
    for i in np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]:
        out.append((float(ts[i]), float(ts[i + 1])))
    out.sort()
    return out


def bisect_root(f, a: float, b: float, tol: float = 1e-10) -> float:
    """Bisection for a bracketed root: f(a) and f(b) have opposite signs."""
    if a == b:
        return a
    fa = float(f(np.array([a]))[0] if callable(f) else f(a))
    fb = float(f(np.array([b]))[0])
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise DomainError(f"root not bracketed on [{a}, {b}]")
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = float(f(np.array([m]))[0])
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def refine_brackets(f, lo, hi, tol: float = 1e-10) -> np.ndarray:
    """Vectorized bisection of many brackets at once.

    ``f`` maps an array of parameters to an array of values; ``lo``/``hi`` are
    matching arrays with f(lo) and f(hi) of opposite (or zero) sign. Returns
    the root estimates.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    flo = np.asarray(f(lo), dtype=float)
    span = float(np.max(hi - lo))
    if span <= tol:
        return 0.5 * (lo + hi)
    n_iter = int(math.ceil(math.log2(span / tol)))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        fm = np.asarray(f(mid), dtype=float)
        left = flo * fm <= 0.0  # root stays in [lo, mid]
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        flo = np.where(left, flo, fm)
    return 0.5 * (lo + hi)


def extract_surface(
    geom: RobotGeometry,
    mode,
    box,
    resolution,
    clip: bool = False,
    mesh_tol: float = 1e-6,
) -> SurfaceMesh:
    """Extract the singularity surface of a mode over a (x, y, alpha) box.

    ``box`` is ((x0, x1), (y0, y1), (alpha0, alpha1)) and ``resolution`` the
    number of grid nodes per axis (a single int or a triple, >= 2 each). The
    zero set of the closed-form polynomial is extracted by marching cubes on
    the grid and every vertex is then refined by bisection along its grid edge
    until the field residual is below mesh_tol relative to the edge's endpoint
    values. With ``clip`` set, only the part of the surface inside the
    workspace is kept: every returned vertex satisfies the joint range
    r_min <= rho_i <= r_max, and faces touching dropped vertices go with them.
    """
    mode = _as_mode(mode)
    geom.require_canonical("the closed-form singularity polynomial")
    axes = _grid_axes(box, resolution)
    xg, yg, ag = np.meshgrid(*axes, indexing="ij")
    values = singularity_values(geom, mode, xg.ravel(), yg.ravel(), ag.ravel()).reshape(xg.shape)

    mask = None
    if clip:
        from .kinematics import leg_lengths

        rho = leg_lengths(geom, xg.ravel(), yg.ravel(), ag.ravel()).reshape(xg.shape + (3,))
        mask = np.all((rho >= geom.r_min) & (rho <= geom.r_max), axis=-1)

    def field(points):
        return singularity_values(geom, mode, points[:, 0], points[:, 1], points[:, 2])

    mesh = isosurface(values, axes, field, mesh_tol=mesh_tol, mask=mask, label=mode.index)
    if clip and not mesh.is_empty:
        # The grid mask only prunes cells; membership is enforced exactly on
        # the refined vertices.
        from .kinematics import leg_lengths
        from .mesh import filter_vertices

        v = mesh.vertices
        rho = leg_lengths(geom, v[:, 0], v[:, 1], v[:, 2])
        keep = np.all((rho >= geom.r_min) & (rho <= geom.r_max), axis=-1)
        mesh = filter_vertices(mesh, keep)
    return mesh


def _grid_axes(box, resolution):
    """Validate a box/resolution pair and return the three axis arrays."""
    if len(box) != 3:
        raise DomainError("box must be ((x0,x1),(y0,y1),(alpha0,alpha1))")
    if isinstance(resolution, int):
        resolution = (resolution, resolution, resolution)
    if len(resolution) != 3 or any(int(r) < 2 for r in resolution):
        raise DomainError(f"resolution must be >= 2 per axis, got {resolution}")
    axes = []
    for (lo, hi), n in zip(box, resolution):
        if not hi > lo:
            raise DomainError(f"empty box range [{lo}, {hi}]")
        axes.append(np.linspace(float(lo), float(hi), int(n)))
    return axes
