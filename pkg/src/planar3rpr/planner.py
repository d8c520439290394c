"""Actuation-mode planning along a workspace path.

A path is discretized into pose samples; for each sample the transmission
quality of all eight actuation modes is the normalized margin |det A| over
the product of the row norms of A. Dynamic programming picks one mode per
sample maximising the product of margins (equivalently minimising the sum of
-log margins) with a fixed penalty per mode switch, so the plan trades
transmission quality against clutch re-configuration count.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasiblePathError
from .geometry import TAU, Pose, RobotGeometry
from .kinematics import jacobians, normalized_margin, transmission_margins
from .workspace import contains_mask

N_MODES = 8


@dataclass(frozen=True)
class PathSample:
    """One pose along a discretized path, at arc length s."""

    pose: Pose
    s: float


def discretize(
    geom: RobotGeometry,
    waypoints,
    step: float,
    step_alpha: float = None,
) -> list:
    """Sample a piecewise-linear pose path at bounded increments.

    Between consecutive waypoints, position interpolates linearly and the
    tilt follows the shortest arc; consecutive samples differ by at most
    ``step`` in position and ``step_alpha`` (default: ``step``, in radians)
    in tilt. Waypoint poses appear exactly; coincident consecutive waypoints
    are collapsed. Raises InfeasiblePathError listing the offending sample
    indices if any sample leaves the workspace.
    """
    waypoints = list(waypoints)
    if len(waypoints) < 2:
        raise DomainError(f"need at least 2 waypoints, got {len(waypoints)}")
    if not (math.isfinite(step) and step > 0.0):
        raise DomainError(f"step must be positive, got {step}")
    if step_alpha is None:
        step_alpha = step
    if not (math.isfinite(step_alpha) and step_alpha > 0.0):
        raise DomainError(f"step_alpha must be positive, got {step_alpha}")

    samples = [PathSample(waypoints[0], 0.0)]
    s = 0.0
    for w0, w1 in zip(waypoints, waypoints[1:]):
        dx = w1.x - w0.x
        dy = w1.y - w0.y
        dist = math.hypot(dx, dy)
        da = math.remainder(w1.alpha - w0.alpha, TAU)
        if dist == 0.0 and da == 0.0:
            continue
        n = max(1, math.ceil(dist / step), math.ceil(abs(da) / step_alpha))
        for k in range(1, n + 1):
            t = k / n
            pose = w1 if k == n else Pose(
                w0.x + t * dx, w0.y + t * dy, w0.alpha + t * da
            )
            samples.append(PathSample(pose, s + t * dist))
        s += dist

    bad = _outside_indices(geom, samples)
    if bad:
        raise InfeasiblePathError(
            f"{len(bad)} of {len(samples)} samples leave the workspace "
            f"(first at index {bad[0]})",
            samples=bad,
        )
    return samples


def _outside_indices(geom: RobotGeometry, samples) -> list:
    xs = np.array([smp.pose.x for smp in samples])
    ys = np.array([smp.pose.y for smp in samples])
    als = np.array([smp.pose.alpha for smp in samples])
    inside = contains_mask(geom, xs, ys, als)
    return [int(i) for i in np.nonzero(~inside)[0]]


@dataclass(frozen=True)
class ModePlan:
    """One actuation mode per path sample, with the achieved margins."""

    modes: tuple  # of int, 1..8, one per sample (empty if infeasible)
    margins: tuple  # of float, matching modes
    switches: tuple  # of int, sample indices where the mode changes
    feasible: bool
    threshold: float
    blocking: tuple = field(default=())  # samples where no mode clears threshold

    @property
    def switch_count(self) -> int:
        return len(self.switches)


def plan_modes(
    geom: RobotGeometry,
    samples,
    margin_threshold: float = 1e-3,
    switch_penalty: float = 1.0,
) -> ModePlan:
    """Choose an actuation mode per sample by dynamic programming.

    Node cost is -log(margin) where the margin clears ``margin_threshold``
    (infinite otherwise) and each mode change adds ``switch_penalty``. Ties
    resolve to the lowest mode index, so the plan is deterministic. If some
    sample admits no mode above the threshold the plan comes back with
    ``feasible=False`` and those samples listed in ``blocking``.
    """
    samples = list(samples)
    if not samples:
        raise DomainError("cannot plan over an empty sample list")
    if not (margin_threshold > 0.0):
        raise DomainError(f"margin_threshold must be positive, got {margin_threshold}")
    if switch_penalty < 0.0:
        raise DomainError(f"switch_penalty must be >= 0, got {switch_penalty}")

    xs = np.array([smp.pose.x for smp in samples])
    ys = np.array([smp.pose.y for smp in samples])
    als = np.array([smp.pose.alpha for smp in samples])
    n = len(samples)

    margin = np.empty((n, N_MODES))
    for m in range(N_MODES):
        margin[:, m] = transmission_margins(geom, xs, ys, als, m + 1)
    margin = np.where(np.isfinite(margin), margin, 0.0)

    with np.errstate(divide="ignore"):
        node = np.where(margin >= margin_threshold, -np.log(margin), np.inf)

    blocked = np.nonzero(~np.any(np.isfinite(node), axis=1))[0]
    if blocked.size:
        return ModePlan(
            modes=(),
            margins=(),
            switches=(),
            feasible=False,
            threshold=margin_threshold,
            blocking=tuple(int(i) for i in blocked),
        )

    # Transition cost matrix: switch_penalty off the diagonal.
    trans = np.full((N_MODES, N_MODES), switch_penalty)
    np.fill_diagonal(trans, 0.0)

    cost = node[0].copy()
    parent = np.zeros((n, N_MODES), dtype=np.int64)
    for j in range(1, n):
        with np.errstate(invalid="ignore"):
            total = cost[:, None] + trans  # (prev mode, next mode)
        best_prev = np.argmin(total, axis=0)  # first minimum: lowest index
        cost = total[best_prev, np.arange(N_MODES)] + node[j]
        parent[j] = best_prev

    end = int(np.argmin(cost))
    chain = [end]
    for j in range(n - 1, 0, -1):
        chain.append(int(parent[j, chain[-1]]))
    chain.reverse()

    modes = tuple(m + 1 for m in chain)
    margins = tuple(float(margin[j, chain[j]]) for j in range(n))
    switches = tuple(j for j in range(1, n) if modes[j] != modes[j - 1])
    return ModePlan(
        modes=modes,
        margins=margins,
        switches=switches,
        feasible=True,
        threshold=margin_threshold,
    )


@dataclass(frozen=True)
class PlanReport:
    """Independent re-check of a ModePlan against the path samples."""

    ok: bool
    worst_margin: float
    switch_count: int
    discrepancies: tuple  # of str


def validate_plan(
    geom: RobotGeometry,
    samples,
    plan: ModePlan,
    margin_threshold: float = None,
) -> PlanReport:
    """Recompute every sample's margin from its Jacobians and audit the plan.

    Uses the scalar Jacobian route rather than the batched margins the
    planner ran on, so the two computations check each other. A plan fails
    when it is marked infeasible, does not cover the samples, quotes a margin
    differing from the recomputed one, dips below the threshold, or misstates
    its switch indices.
    """
    samples = list(samples)
    if margin_threshold is None:
        margin_threshold = plan.threshold
    issues = []
    if not plan.feasible:
        issues.append("plan is marked infeasible")
    if len(plan.modes) != len(samples):
        issues.append(
            f"plan covers {len(plan.modes)} samples, path has {len(samples)}"
        )
    worst = math.inf
    n = min(len(plan.modes), len(samples))
    for j in range(n):
        jac = jacobians(geom, samples[j].pose, plan.modes[j])
        margin = normalized_margin(jac)
        worst = min(worst, margin)
        if margin < margin_threshold:
            issues.append(
                f"sample {j}: margin {margin:.6g} below threshold {margin_threshold:.6g}"
            )
        if abs(margin - plan.margins[j]) > 1e-9 * max(1.0, abs(margin)):
            issues.append(
                f"sample {j}: stored margin {plan.margins[j]:.12g} "
                f"!= recomputed {margin:.12g}"
            )
    switches = tuple(
        j for j in range(1, len(plan.modes)) if plan.modes[j] != plan.modes[j - 1]
    )
    if switches != tuple(plan.switches):
        issues.append(f"switch indices {plan.switches} != recomputed {switches}")
    if not math.isfinite(worst):
        worst = math.nan
        if not issues:
            issues.append("plan is empty")
    return PlanReport(
        ok=not issues,
        worst_margin=worst,
        switch_count=len(switches),
        discrepancies=tuple(issues),
    )


PATH_COLUMNS = ("x", "y", "alpha")
PLAN_COLUMNS = ("s", "x", "y", "alpha", "mode", "margin")


def read_path_csv(path, degrees: bool = False) -> list:
    """Read waypoints from a CSV file with header columns x,y,alpha.

    With ``degrees=True`` the alpha column is interpreted in degrees and
    converted before the pose is built (poses always store radians).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        missing = [c for c in PATH_COLUMNS if c not in names]
        if missing:
            raise DomainError(
                f"path CSV must have columns x,y,alpha; missing {missing}"
            )
        waypoints = []
        for lineno, row in enumerate(reader, start=2):
            try:
                alpha = float(row["alpha"])
                if degrees:
                    alpha = math.radians(alpha)
                waypoints.append(Pose(float(row["x"]), float(row["y"]), alpha))
            except (TypeError, ValueError) as exc:
                raise DomainError(f"bad path CSV row at line {lineno}: {exc}") from exc
    if not waypoints:
        raise DomainError("path CSV contains no waypoints")
    return waypoints


def write_plan_csv(path, samples, plan: ModePlan) -> None:
    """Write samples and their planned modes as CSV s,x,y,alpha,mode,margin."""
    samples = list(samples)
    if len(plan.modes) != len(samples):
        raise DomainError("plan does not cover the samples")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(PLAN_COLUMNS) + "\n")
        for smp, mode, margin in zip(samples, plan.modes, plan.margins):
            fh.write(
                f"{smp.s:.12g},{smp.pose.x:.12g},{smp.pose.y:.12g},"
                f"{smp.pose.alpha:.12g},{mode:d},{margin:.12g}\n"
            )
