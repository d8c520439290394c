"""Workspace membership, boundary surfaces, and regular-workspace sizing.

The reachable workspace is the set of poses (x, y, alpha) whose three leg
lengths all lie in [r_min, r_max]. Its boundary is carved from six implicit
surfaces, rho_i = r_min and rho_i = r_max for each leg; for the canonical
geometry each surface admits the closed-form expansion s_i(x, y, alpha, r) =
rho_i^2 - r^2 hard-coded below, which the tests cross-check against the
direct distance computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .geometry import Pose, RobotGeometry, rotation_matrix
from .kinematics import leg_lengths
from .mesh import SurfaceMesh, isosurface, merge_meshes

R3 = math.sqrt(3.0)


def _s1(x, y, c, s, r):
    return (
        10.0 * R3 * x * s
        - 10.0 * R3 * y * c
        - r**2
        + x**2
        - 30.0 * x * c
        + y**2
        - 30.0 * y * s
        + 300.0
    )


def _s2(x, y, c, s, r):
    return (
        (-10.0 * y * c + 10.0 * s * (x - 90.0)) * R3
        + (30.0 * x - 2700.0) * c
        + x**2
        + y**2
        + 30.0 * y * s
        - r**2
        - 180.0 * x
        + 8400.0
    )


def _s3(x, y, c, s, r):
    return (
        (20.0 * y * c + (-20.0 * x + 900.0) * s - 90.0 * y) * R3
        + x**2
        + y**2
        - r**2
        - 90.0 * x
        - 2700.0 * c
        + 8400.0
    )


_BOUNDARY = {1: _s1, 2: _s2, 3: _s3}


def boundary_values(geom: RobotGeometry, leg: int, xs, ys, alphas, r) -> np.ndarray:
    """Vectorized boundary surface value rho_leg^2 - r^2, canonical geometry."""
    if leg not in _BOUNDARY:
        raise DomainError(f"leg must be 1, 2 or 3, got {leg}")
    geom.require_canonical("the closed-form boundary surfaces")
    if r < 0.0:
        raise DomainError(f"radius must be nonnegative, got {r}")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    return _BOUNDARY[leg](xs, ys, np.cos(alphas), np.sin(alphas), float(r))


def boundary_value(geom: RobotGeometry, leg: int, pose: Pose, r: float) -> float:
    """Boundary surface value rho_leg^2 - r^2 at one pose (zero on the surface)."""
    return float(
        boundary_values(
            geom, leg, np.array([pose.x]), np.array([pose.y]), np.array([pose.alpha]), r
        )[0]
    )


@dataclass(frozen=True)
class MembershipReport:
    """Outcome of a workspace membership query."""

    inside: bool
    rho: tuple
    violations: tuple  # of (leg, "r_min" | "r_max"), leg 1-based


def contains(geom: RobotGeometry, pose: Pose) -> MembershipReport:
    """Check r_min <= rho_i <= r_max for all legs at a pose."""
    rho = leg_lengths(
        geom, np.array([pose.x]), np.array([pose.y]), np.array([pose.alpha])
    )[0]
    violations = []
    for i in range(3):
        if rho[i] < geom.r_min:
            violations.append((i + 1, "r_min"))
        elif rho[i] > geom.r_max:
            violations.append((i + 1, "r_max"))
    return MembershipReport(
        inside=not violations,
        rho=tuple(float(v) for v in rho),
        violations=tuple(violations),
    )


def contains_mask(geom: RobotGeometry, xs, ys, alphas) -> np.ndarray:
    """Vectorized membership test, boolean (N,)."""
    rho = leg_lengths(geom, xs, ys, alphas)
    return np.all((rho >= geom.r_min) & (rho <= geom.r_max), axis=-1)


@dataclass(frozen=True)
class RegularWorkspaceSpec:
    """A required regular workspace: a disc of poses swept over a tilt range.

    The platform point p must reach every position in the disc of radius
    ``r_w`` about ``center`` (base-triangle centroid when omitted) at every
    tilt alpha in [alpha_min, alpha_max].
    """

    r_w: float
    alpha_min: float
    alpha_max: float
    center: Optional[tuple] = None

    def __post_init__(self):
        if not (math.isfinite(self.r_w) and self.r_w >= 0.0):
            raise DomainError(f"r_w must be >= 0, got {self.r_w}")
        if not (math.isfinite(self.alpha_min) and math.isfinite(self.alpha_max)):
            raise DomainError("alpha range must be finite")
        if self.alpha_max < self.alpha_min:
            raise DomainError(
                f"alpha_max < alpha_min ({self.alpha_max} < {self.alpha_min})"
            )
        if self.center is not None:
            c = (float(self.center[0]), float(self.center[1]))
            if not all(math.isfinite(v) for v in c):
                raise DomainError("center must be finite")
            object.__setattr__(self, "center", c)

    def resolved_center(self, geom: RobotGeometry) -> np.ndarray:
        if self.center is None:
            return geom.base_centroid
        return np.asarray(self.center, dtype=float)


@dataclass(frozen=True)
class WorkspaceRequirements:
    """Joint range every leg needs so the regular workspace is fully covered."""

    rho_min_req: float
    rho_max_req: float
    reachable: bool
    per_leg: tuple  # of (lo_i, hi_i)


def regular_workspace_requirements(
    geom: RobotGeometry, spec: RegularWorkspaceSpec
) -> WorkspaceRequirements:
    """Exact stroke requirements for a disc of positions swept over a tilt range.

    For leg i the length at pose (p, alpha) is |p - g_i(alpha)| with
    g_i(alpha) = a_i - R(alpha) u_i, so over the disc |p - m| <= r_w the
    extremes are D_i(alpha) -/+ r_w where D_i(alpha) = |m - g_i(alpha)|.
    D_i^2(alpha) = |w_i|^2 + |u_i|^2 + 2 K_i cos(alpha - psi_i) with
    w_i = m - a_i, so its extremes over [alpha_min, alpha_max] occur at the
    interval ends or at alpha = psi_i + k pi; all candidates are enumerated.

    The requirement is reachable only if every leg keeps a strictly positive
    minimum length (the disc must not contain a serial singularity).
    """
    m = spec.resolved_center(geom)
    per_leg = []
    reachable = True
    for i in range(3):
        w = m - geom.base_anchors[i]
        u = geom.platform_offsets[i]
        eu = np.array([-u[1], u[0]])
        p0 = float(w @ w + u @ u)
        kc = float(w @ u)
        ks = float(w @ eu)
        k_amp = math.hypot(kc, ks)
        psi = math.atan2(ks, kc)
        candidates = [spec.alpha_min, spec.alpha_max]
        if k_amp > 0.0:
            k_lo = math.ceil((spec.alpha_min - psi) / math.pi)
            k_hi = math.floor((spec.alpha_max - psi) / math.pi)
            candidates.extend(psi + k * math.pi for k in range(k_lo, k_hi + 1))
        d2 = [p0 + 2.0 * k_amp * math.cos(a - psi) for a in candidates]
        d_lo = math.sqrt(max(min(d2), 0.0))
        d_hi = math.sqrt(max(max(d2), 0.0))
        lo_i = max(d_lo - spec.r_w, 0.0)
        hi_i = d_hi + spec.r_w
        if lo_i <= 0.0:
            reachable = False
        per_leg.append((lo_i, hi_i))
    return WorkspaceRequirements(
        rho_min_req=min(lo for lo, _ in per_leg),
        rho_max_req=max(hi for _, hi in per_leg),
        reachable=reachable,
        per_leg=tuple(per_leg),
    )


@dataclass(frozen=True)
class OracleResult:
    """Brute-force grid estimate of the regular-workspace requirements."""

    rho_min_req: float
    rho_max_req: float
    grid_bound: float  # the true extremes lie within this of the estimates


def regular_workspace_oracle(
    geom: RobotGeometry, spec: RegularWorkspaceSpec, resolution: int = 201
) -> OracleResult:
    """Estimate the stroke requirements by dense sampling of disc x tilt range.

    Independent of regular_workspace_requirements: no critical-angle
    reasoning, only distances from grid points to the rotated anchors.
    ``grid_bound`` is a Lipschitz bound on the sampling error (|grad_p rho| =
    1 and |d rho / d alpha| <= |u_i|).
    """
    if resolution < 2:
        raise DomainError(f"resolution must be >= 2, got {resolution}")
    m = spec.resolved_center(geom)
    if spec.r_w > 0.0:
        side = np.linspace(-spec.r_w, spec.r_w, resolution)
        px, py = np.meshgrid(m[0] + side, m[1] + side, indexing="ij")
        keep = (px - m[0]) ** 2 + (py - m[1]) ** 2 <= spec.r_w**2
        pts = np.column_stack([px[keep], py[keep]])
        h_xy = side[1] - side[0]
    else:
        pts = m.reshape(1, 2)
        h_xy = 0.0
    if spec.alpha_max > spec.alpha_min:
        alphas = np.linspace(spec.alpha_min, spec.alpha_max, resolution)
        h_a = alphas[1] - alphas[0]
    else:
        alphas = np.array([spec.alpha_min])
        h_a = 0.0

    u = geom.platform_offsets
    rho_lo = math.inf
    rho_hi = -math.inf
    for a in alphas:
        g = geom.base_anchors - u @ rotation_matrix(float(a)).T  # (3, 2)
        d = np.hypot(
            pts[:, 0][:, None] - g[None, :, 0], pts[:, 1][:, None] - g[None, :, 1]
        )
        rho_lo = min(rho_lo, float(d.min()))
        rho_hi = max(rho_hi, float(d.max()))
    u_max = float(np.max(np.hypot(u[:, 0], u[:, 1])))
    # Any pose of the continuous problem is within one cell diagonal (in p)
    # and one alpha step of a grid sample; disc-edge effects are covered by
    # the full diagonal.
    bound = math.hypot(h_xy, h_xy) + h_a * u_max
    return OracleResult(rho_min_req=rho_lo, rho_max_req=rho_hi, grid_bound=bound)


def default_workspace_box(geom: RobotGeometry, pad: float = 0.05):
    """A (x, y, alpha) box guaranteed to contain the reachable workspace."""
    reach = geom.r_max + float(
        np.max(np.hypot(geom.platform_offsets[:, 0], geom.platform_offsets[:, 1]))
    )
    a = geom.base_anchors
    x_lo, x_hi = float(a[:, 0].max() - reach), float(a[:, 0].min() + reach)
    y_lo, y_hi = float(a[:, 1].max() - reach), float(a[:, 1].min() + reach)
    if x_hi <= x_lo or y_hi <= y_lo:
        raise DomainError("geometry admits no reachable positions")
    dx = pad * (x_hi - x_lo)
    dy = pad * (y_hi - y_lo)
    return (
        (x_lo - dx, x_hi + dx),
        (y_lo - dy, y_hi + dy),
        (-math.pi, math.pi),
    )


def workspace_mesh(
    geom: RobotGeometry,
    box=None,
    resolution=65,
    mesh_tol: float = 1e-6,
) -> SurfaceMesh:
    """Triangle mesh of the workspace boundary in (x, y, alpha) space.

    Six surface families are extracted — each leg against each joint limit —
    and every vertex is kept only where the whole pose stays in the workspace
    (within a small slack normal to the vertex's own surface). Vertex labels
    encode the family as 10 * leg + bound with bound 0 for r_min and 1 for
    r_max.
    """
    from .mesh import filter_vertices
    from .singularity import _grid_axes

    geom.require_canonical("the closed-form boundary surfaces")
    if box is None:
        box = default_workspace_box(geom)
    axes = _grid_axes(box, resolution)
    xg, yg, ag = np.meshgrid(*axes, indexing="ij")
    shape = xg.shape
    xs, ys, als = xg.ravel(), yg.ravel(), ag.ravel()
    rho = leg_lengths(geom, xs, ys, als).reshape(shape + (3,))
    ok = (rho >= geom.r_min) & (rho <= geom.r_max)
    # Vertices sit exactly on their own boundary surface, so membership is
    # checked with a slack well above the refinement residual and well below
    # any geometric feature.
    slack = 1e-4 * max(1.0, geom.r_max)

    pieces = []
    for leg in (1, 2, 3):
        others = [k for k in range(3) if k != leg - 1]
        mask = ok[..., others[0]] & ok[..., others[1]]
        for bound, r in ((0, geom.r_min), (1, geom.r_max)):
            values = boundary_values(geom, leg, xs, ys, als, r).reshape(shape)

            def field(points, _leg=leg, _r=r):
                return boundary_values(
                    geom, _leg, points[:, 0], points[:, 1], points[:, 2], _r
                )

            piece = isosurface(
                values,
                axes,
                field,
                mesh_tol=mesh_tol,
                mask=mask,
                label=10 * leg + bound,
            )
            if not piece.is_empty:
                v = piece.vertices
                rv = leg_lengths(geom, v[:, 0], v[:, 1], v[:, 2])
                keep = np.all(
                    (rv >= geom.r_min - slack) & (rv <= geom.r_max + slack), axis=-1
                )
                piece = filter_vertices(piece, keep)
            pieces.append(piece)
    return merge_meshes(pieces)
