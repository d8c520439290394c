"""Core geometry: robot dimensions, poses, actuation modes, and anchor points.

The robot is a planar 3-RPR parallel manipulator. Three legs connect base
anchors a1, a2, a3 (an equilateral triangle of side ``base_side``) to platform
anchors b1, b2, b3 (an equilateral triangle of side ``platform_side`` riding on
the mobile platform). Each leg is a revolute joint at a_i, an extensible
prismatic link of length rho_i, and a revolute joint at b_i. The platform pose
is (x, y, alpha): the position of the platform centroid P and the orientation
of the platform frame relative to the base frame.

Every type here is immutable and every function is pure, so unrestricted
concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TAU = 2.0 * math.pi

# 90-degree rotation; E @ v rotates v counterclockwise by pi/2.
E = np.array([[0.0, -1.0], [1.0, 0.0]])


def normalize_angle(alpha: float) -> float:
    """Map an angle to the representative interval (-pi, pi].

    The tie at -pi maps to +pi so each physical orientation has exactly one
    representative.
    """
    if not math.isfinite(alpha):
        raise DomainError(f"angle must be finite, got {alpha!r}")
    r = math.remainder(alpha, TAU)
    if r <= -math.pi:
        r = math.pi
    return r


def rotation_matrix(alpha: float) -> np.ndarray:
    """2x2 rotation matrix for angle alpha."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Pose:
    """Planar pose (x, y, alpha) of the platform centroid P.

    alpha is normalized to (-pi, pi] on construction.
    """

    x: float
    y: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"pose coordinates must be finite, got ({self.x!r}, {self.y!r})")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "alpha", normalize_angle(self.alpha))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.alpha])


#: Per-leg actuation choice. "R" = the base revolute joint (theta_i) is
#: motor-driven; "P" = the prismatic joint (rho_i) is motor-driven.
REVOLUTE_ACTIVE = "R"
PRISMATIC_ACTIVE = "P"

#: The eight actuation modes, indexed 1..8: which joint is driven in each leg.
MODE_TABLE = {
    1: ("R", "R", "R"),
    2: ("R", "R", "P"),
    3: ("R", "P", "R"),
    4: ("P", "R", "R"),
    5: ("R", "P", "P"),
    6: ("P", "P", "R"),
    7: ("P", "R", "P"),
    8: ("P", "P", "P"),
}


@dataclass(frozen=True)
class ActuationMode:
    """One of the eight ways of choosing a driven joint per leg."""

    index: int
    per_leg: tuple[str, str, str]

    @classmethod
    def from_index(cls, index: int) -> "ActuationMode":
        if index not in MODE_TABLE:
            raise DomainError(f"actuation mode index must be 1..8, got {index}")
        return cls(index=index, per_leg=MODE_TABLE[index])

    def revolute_active(self, leg: int) -> bool:
        """True if leg (0-based) drives its base revolute joint."""
        return self.per_leg[leg] == REVOLUTE_ACTIVE

    def __str__(self):
        names = ["theta" if d == REVOLUTE_ACTIVE else "rho" for d in self.per_leg]
        return f"mode {self.index} ({', '.join(f'{n}{i+1}' for i, n in enumerate(names))})"


def mode_table(index: int) -> ActuationMode:
    """Return the actuation mode for a 1-based table index."""
    return ActuationMode.from_index(index)


@dataclass(frozen=True)
class ClutchScheme:
    """State of the two clutches in one leg's transmission.

    Clutch 1 couples the motor to the base revolute joint, clutch 2 to the
    scissor (prismatic) drive. Exactly one must be engaged for the leg to be
    usable in an actuation mode: both-off leaves the leg free, both-on couples
    the two joints and is not plannable.
    """

    clutch1: bool
    clutch2: bool

    @property
    def interpretation(self) -> str:
        if self.clutch1 and self.clutch2:
            return "coupled"
        if self.clutch1:
            return "revolute-driven"
        if self.clutch2:
            return "prismatic-driven"
        return "free"

    @property
    def plannable(self) -> bool:
        return self.clutch1 != self.clutch2

    def drive(self) -> str:
        """The per-leg drive letter ("R"/"P") for a plannable scheme."""
        if not self.plannable:
            raise DomainError(f"clutch scheme '{self.interpretation}' is not plannable")
        return REVOLUTE_ACTIVE if self.clutch1 else PRISMATIC_ACTIVE


def mode_from_clutches(schemes) -> ActuationMode:
    """Build an ActuationMode from three per-leg clutch schemes."""
    if len(schemes) != 3:
        raise DomainError(f"need exactly 3 clutch schemes, got {len(schemes)}")
    per_leg = tuple(s.drive() for s in schemes)
    for index, drives in MODE_TABLE.items():
        if drives == per_leg:
            return ActuationMode(index=index, per_leg=per_leg)
    raise DomainError(f"no actuation mode for drives {per_leg}")  # pragma: no cover


#: Documented keys accepted in a geometry config file.
CONFIG_KEYS = ("base_side", "platform_side", "epsilon", "r_min", "r_max", "scissor_n")

#: Tolerance used when checking whether dimensions are the canonical ones.
CANONICAL_TOL = 1e-12


@dataclass(frozen=True)
class RobotGeometry:
    """Dimensions of the robot.

    base_side
        Side of the equilateral base triangle A1 A2 A3. The base frame puts
        a1 at the origin and a2 on the +x axis, so a3 = (base_side/2,
        base_side*sqrt(3)/2).
    platform_side
        Side of the equilateral platform triangle B1 B2 B3.
    epsilon
        Angle at B1 between B2 and B3 (pi/3 for the equilateral platform).
    r_min, r_max
        Admissible prismatic range r_min <= rho_i <= r_max. r_min > 0 keeps
        every leg away from its serial singularity at rho_i = 0.
    scissor_n
        Number of scissor cells realizing each prismatic link.
    """

    base_side: float = 90.0
    platform_side: float = 30.0
    epsilon: float = math.pi / 3.0
    r_min: float = 8.0
    r_max: float = 59.0
    scissor_n: int = 1

    def __post_init__(self):
        if not (self.base_side > 0 and self.platform_side > 0):
            raise DomainError("base_side and platform_side must be positive")
        if not 0 < self.epsilon < math.pi:
            raise DomainError(f"epsilon must lie in (0, pi), got {self.epsilon}")
        if not (0 < self.r_min <= self.r_max):
            raise DomainError(
                f"need 0 < r_min <= r_max, got r_min={self.r_min}, r_max={self.r_max}"
            )
        if not (isinstance(self.scissor_n, int) and self.scissor_n >= 1):
            raise DomainError(f"scissor_n must be a positive integer, got {self.scissor_n!r}")

    @property
    def base_anchors(self) -> np.ndarray:
        """Base anchor points a1, a2, a3 as a (3, 2) array."""
        s = self.base_side
        return np.array([[0.0, 0.0], [s, 0.0], [0.5 * s, 0.5 * s * math.sqrt(3.0)]])

    @property
    def base_centroid(self) -> np.ndarray:
        return self.base_anchors.mean(axis=0)

    @property
    def platform_offsets(self) -> np.ndarray:
        """Platform anchor offsets u1, u2, u3 in the platform frame, (3, 2).

        b_i = p + R(alpha) u_i. The offsets are chosen so that B1B2 lies along
        the platform x axis (u2 - u1 = (platform_side, 0)), the angle at B1 is
        epsilon, and u1 + u2 + u3 = 0 — which makes P the platform centroid.
        """
        c = self.platform_side
        ce, se = math.cos(self.epsilon), math.sin(self.epsilon)
        u1 = np.array([-c * (1.0 + ce) / 3.0, -c * se / 3.0])
        u2 = u1 + np.array([c, 0.0])
        u3 = u1 + c * np.array([ce, se])
        return np.array([u1, u2, u3])

    @property
    def is_canonical(self) -> bool:
        """Whether dimensions match the canonical 90 / 30 / pi/3 values.

        The closed-form singularity polynomials and the printed workspace
        boundary surfaces hold only for this geometry.
        """
        return (
            abs(self.base_side - 90.0) < CANONICAL_TOL
            and abs(self.platform_side - 30.0) < CANONICAL_TOL
            and abs(self.epsilon - math.pi / 3.0) < CANONICAL_TOL
        )

    def require_canonical(self, what: str) -> None:
        from .errors import UnsupportedGeometryError

        if not self.is_canonical:
            raise UnsupportedGeometryError(
                f"{what} is only valid for the canonical dimensions "
                f"(base_side=90, platform_side=30, epsilon=pi/3); got "
                f"base_side={self.base_side}, platform_side={self.platform_side}, "
                f"epsilon={self.epsilon}"
            )

    def replace(self, **changes) -> "RobotGeometry":
        from dataclasses import replace as dc_replace

        return dc_replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "base_side": self.base_side,
            "platform_side": self.platform_side,
            "epsilon": self.epsilon,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "scissor_n": self.scissor_n,
        }

    @classmethod
    def from_config(cls, path) -> "RobotGeometry":
        """Load dimensions from a plain-text ``key = value`` config file.

        Recognized keys: base_side, platform_side, epsilon, r_min, r_max,
        scissor_n. Lines starting with '#' (and blank lines) are ignored.
        Unknown keys raise DomainError so typos cannot silently fall back to
        defaults.
        """
        values = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DomainError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in CONFIG_KEYS:
                    raise DomainError(
                        f"{path}:{lineno}: unknown config key {key!r} "
                        f"(known: {', '.join(CONFIG_KEYS)})"
                    )
                if key in values:
                    raise DomainError(f"{path}:{lineno}: duplicate config key {key!r}")
                try:
                    values[key] = int(value) if key == "scissor_n" else float(value)
                except ValueError as exc:
                    raise DomainError(f"{path}:{lineno}: bad value for {key}: {value.strip()!r}") from exc
        return cls(**values)


@dataclass(frozen=True)
class JointState:
    """Leg joint variables: base revolute angles theta_i and leg lengths rho_i."""

    theta: tuple[float, float, float]
    rho: tuple[float, float, float]

    def __post_init__(self):
        if len(self.theta) != 3 or len(self.rho) != 3:
            raise DomainError("theta and rho must have exactly three components")
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))
        object.__setattr__(self, "rho", tuple(float(r) for r in self.rho))

    def anchors(self, geom: RobotGeometry) -> np.ndarray:
        """Platform anchor points b_i = a_i + rho_i (cos theta_i, sin theta_i), (3, 2)."""
        a = geom.base_anchors
        t = np.asarray(self.theta)
        r = np.asarray(self.rho)
        return a + r[:, None] * np.column_stack([np.cos(t), np.sin(t)])


def platform_anchors(geom: RobotGeometry, pose: Pose) -> np.ndarray:
    """Platform anchor points b1, b2, b3 for a pose, as a (3, 2) array.

    b_i = p + R(alpha) u_i; since the offsets u_i sum to zero, the centroid of
    the three anchors is exactly (x, y).
    """
    p = np.array([pose.x, pose.y])
    return p + geom.platform_offsets @ rotation_matrix(pose.alpha).T


def platform_anchors_batch(geom: RobotGeometry, xs, ys, alphas) -> np.ndarray:
    """Vectorized platform anchors for N poses: returns shape (N, 3, 2)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    c, s = np.cos(alphas), np.sin(alphas)
    u = geom.platform_offsets  # (3, 2)
    # R(alpha) u_i for each pose and leg.
    bx = xs[:, None] + u[None, :, 0] * c[:, None] - u[None, :, 1] * s[:, None]
    by = ys[:, None] + u[None, :, 0] * s[:, None] + u[None, :, 1] * c[:, None]
    return np.stack([bx, by], axis=-1)
