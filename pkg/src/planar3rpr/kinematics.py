"""Inverse/forward kinematics, Jacobians, and velocity transmission.

The platform velocity twist t = [dx/dt, dy/dt, dalpha/dt] and the actuated
joint rates q' are related by A t = B q', where row i of the direct Jacobian A
is [h_i^T, -h_i^T E (p - b_i)] and B = diag(rho_1, rho_2, rho_3). The
multiplier h_i eliminates the leg's idle joint rate:

* prismatic-actuated leg: h_i = (b_i - a_i), which annihilates the theta_i'
  term because (b_i - a_i)^T E (b_i - a_i) = 0;
* revolute-actuated leg: h_i = E (b_i - a_i) / rho_i, which annihilates the
  rho_i' term and keeps the matching B entry equal to rho_i.

A loses rank exactly at the parallel singularities; B is singular only at a
serial singularity rho_i = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InconsistentSensorsError,
    SerialSingularityError,
    SingularTransmissionError,
)
from .geometry import (
    E,
    ActuationMode,
    JointState,
    Pose,
    RobotGeometry,
    platform_anchors,
    platform_anchors_batch,
    rotation_matrix,
)

#: Leg lengths below this are treated as a serial singularity.
TOL_SERIAL = 1e-9

#: Normalized |det A| below this is treated as a parallel singularity.
TOL_SING = 1e-8


@dataclass(frozen=True, eq=False)
class JacobianPair:
    """Direct Jacobian A (3x3) and inverse Jacobian B (diagonal 3x3) for a mode."""

    A: np.ndarray
    B: np.ndarray
    mode: ActuationMode


def _as_mode(mode) -> ActuationMode:
    if isinstance(mode, ActuationMode):
        return mode
    return ActuationMode.from_index(mode)


def inverse_kinematics(geom: RobotGeometry, pose: Pose, tol_serial: float = TOL_SERIAL) -> JointState:
    """Unique joint state for a pose: rho_i = |b_i - a_i|, theta_i = atan2(b_i - a_i).

    Raises SerialSingularityError when some b_i coincides with a_i (rho_i below
    tol_serial), where theta_i is undefined.
    """
    d = platform_anchors(geom, pose) - geom.base_anchors
    rho = np.hypot(d[:, 0], d[:, 1])
    for i in range(3):
        if rho[i] < tol_serial:
            raise SerialSingularityError(i + 1, rho[i])
    theta = np.arctan2(d[:, 1], d[:, 0])
    return JointState(theta=tuple(theta), rho=tuple(rho))


def constraint_residuals(geom: RobotGeometry, pose: Pose, joints: JointState) -> np.ndarray:
    """The six loop-closure residuals for a (pose, joint state) pair, as a (6,) array.

    Components 0-1 close the loop through legs 1 and 2, components 2-3 the loop
    through legs 1 and 3, and components 4-5 tie the platform placement to leg 1.
    All six vanish exactly when the joints are the inverse kinematics of the pose.
    """
    b = joints.anchors(geom)
    rot = rotation_matrix(pose.alpha)
    u = geom.platform_offsets
    p = np.array([pose.x, pose.y])
    r12 = b[0] + rot @ (u[1] - u[0]) - b[1]
    r13 = b[0] + rot @ (u[2] - u[0]) - b[2]
    rp = p + rot @ u[0] - b[0]
    return np.concatenate([r12, r13, rp])


def forward_kinematics_sensors(
    geom: RobotGeometry, joints: JointState, tol_fk: float | None = None
) -> tuple[Pose, float]:
    """Pose from the sensed joint state, plus the leg-3 consistency residual.

    Legs 1 and 2 determine the pose: b2 - b1 = R(alpha) (platform_side, 0)
    gives alpha directly, then p = b1 - R(alpha) u1. Leg 3 is redundant and is
    used as a check: the residual is the distance between b3 implied by the
    pose and b3 from the sensors. A residual at or above tol_fk (default
    1e-6 * base_side) raises InconsistentSensorsError — either a sensor fault
    or joint values that do not belong to one rigid placement.
    """
    if tol_fk is None:
        tol_fk = 1e-6 * geom.base_side
    for i, r in enumerate(joints.rho):
        if r <= 0:
            raise DomainError(f"rho_{i + 1} must be positive, got {r}")
    b = joints.anchors(geom)
    d21 = b[1] - b[0]
    alpha = math.atan2(d21[1], d21[0])
    rot = rotation_matrix(alpha)
    u = geom.platform_offsets
    p = b[0] - rot @ u[0]
    b3_model = p + rot @ u[2]
    residual = float(np.hypot(*(b3_model - b[2])))
    if residual >= tol_fk:
        raise InconsistentSensorsError(residual, tol_fk)
    return Pose(p[0], p[1], alpha), residual


def jacobians(geom: RobotGeometry, pose: Pose, mode, tol_serial: float = TOL_SERIAL) -> JacobianPair:
    """Direct/inverse Jacobian pair (A, B) at a pose for an actuation mode."""
    mode = _as_mode(mode)
    b = platform_anchors(geom, pose)
    d = b - geom.base_anchors
    rho = np.hypot(d[:, 0], d[:, 1])
    for i in range(3):
        if rho[i] < tol_serial:
            raise SerialSingularityError(i + 1, rho[i])
    p = np.array([pose.x, pose.y])
    A = np.empty((3, 3))
    for i in range(3):
        h = (E @ d[i]) / rho[i] if mode.revolute_active(i) else d[i]
        v = p - b[i]
        A[i, 0] = h[0]
        A[i, 1] = h[1]
        A[i, 2] = h[0] * v[1] - h[1] * v[0]  # -h^T E v
    return JacobianPair(A=A, B=np.diag(rho), mode=mode)


def normalized_margin(jac: JacobianPair, signed: bool = False) -> float:
    """det(A) divided by the product of the row norms of A.

    Scale-invariant: rows of A mix unitless (revolute) and length-valued
    (prismatic) entries, so the raw determinant is not comparable across
    modes; the normalized value always lies in [-1, 1] and vanishes exactly
    at the parallel singularities.
    """
    det = float(np.linalg.det(jac.A))
    scale = float(np.prod(np.linalg.norm(jac.A, axis=1)))
    value = det / scale
    return value if signed else abs(value)


def velocity_transmission(
    jac: JacobianPair,
    *,
    rates=None,
    twist=None,
    tol_sing: float = TOL_SING,
):
    """Solve A t = B q' in either direction.

    Exactly one of ``rates`` (actuated joint rates q', length 3) or ``twist``
    (platform twist t = [dx/dt, dy/dt, dalpha/dt]) must be given; the other is
    returned. The rates -> twist direction requires inverting A and raises
    SingularTransmissionError (carrying the normalized margin) near a parallel
    singularity; the twist -> rates direction only inverts the diagonal B.
    """
    if (rates is None) == (twist is None):
        raise DomainError("pass exactly one of rates= or twist=")
    if twist is not None:
        t = np.asarray(twist, dtype=float)
        if t.shape != (3,):
            raise DomainError(f"twist must have shape (3,), got {t.shape}")
        return np.linalg.solve(jac.B, jac.A @ t)
    q = np.asarray(rates, dtype=float)
    if q.shape != (3,):
        raise DomainError(f"rates must have shape (3,), got {q.shape}")
    margin = normalized_margin(jac)
    if margin < tol_sing:
        raise SingularTransmissionError(margin, tol_sing)
    return np.linalg.solve(jac.A, jac.B @ q)


def leg_lengths(geom: RobotGeometry, xs, ys, alphas) -> np.ndarray:
    """Vectorized leg lengths rho_i for N poses; returns shape (N, 3)."""
    d = platform_anchors_batch(geom, xs, ys, alphas) - geom.base_anchors[None, :, :]
    return np.hypot(d[..., 0], d[..., 1])


def transmission_margins(geom: RobotGeometry, xs, ys, alphas, mode, signed: bool = False) -> np.ndarray:
    """Vectorized normalized margin for N poses in one actuation mode, shape (N,).

    Poses at a serial singularity (some rho_i = 0) yield NaN: the revolute-leg
    rows of A are undefined there.
    """
    mode = _as_mode(mode)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    b = platform_anchors_batch(geom, xs, ys, alphas)  # (N, 3, 2)
    d = b - geom.base_anchors[None, :, :]
    p = np.stack([xs, ys], axis=-1)  # (N, 2)
    v = p[:, None, :] - b  # (N, 3, 2)
    A = np.empty(b.shape[:1] + (3, 3))
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(3):
            if mode.revolute_active(i):
                rho_i = np.hypot(d[:, i, 0], d[:, i, 1])
                hx = -d[:, i, 1] / rho_i
                hy = d[:, i, 0] / rho_i
            else:
                hx = d[:, i, 0]
                hy = d[:, i, 1]
            A[:, i, 0] = hx
            A[:, i, 1] = hy
            A[:, i, 2] = hx * v[:, i, 1] - hy * v[:, i, 0]
        det = np.linalg.det(A)
        scale = np.prod(np.linalg.norm(A, axis=2), axis=1)
        value = det / scale
    return value if signed else np.abs(value)
