"""Kinematics, singularity, workspace and mode-planning analysis of a
variable-actuation 3-RPR planar parallel robot with scissor-driven legs.

Each of the three legs is an RPR chain whose revolute base joint and
prismatic extension can each be motorized or left passive through a
double-clutch transmission, giving eight actuation modes. This package
provides the closed-form kinematics of the canonical design, the parallel
singularity loci of all eight modes (as polynomials, determinants and a
geometric line test), workspace membership and boundary meshing, the
regular-workspace sizing that drives the scissor-leg design, and a dynamic
programming planner that assigns actuation modes along a path so every
traversed configuration keeps a safe transmission margin.
"""

from .errors import (
    DomainError,
    InconsistentSensorsError,
    InfeasibleDesignError,
    InfeasiblePathError,
    JointLimitError,
    RobotModelError,
    SerialSingularityError,
    SingularTransmissionError,
    UnsupportedGeometryError,
)
from .geometry import (
    ActuationMode,
    ClutchScheme,
    JointState,
    MODE_TABLE,
    Pose,
    RobotGeometry,
    mode_from_clutches,
    mode_table,
    normalize_angle,
    platform_anchors,
    rotation_matrix,
)
from .kinematics import (
    JacobianPair,
    constraint_residuals,
    forward_kinematics_sensors,
    inverse_kinematics,
    jacobians,
    leg_lengths,
    normalized_margin,
    transmission_margins,
    velocity_transmission,
)
from .mesh import (
    SurfaceMesh,
    filter_vertices,
    isosurface,
    mesh_projections,
    merge_meshes,
    write_obj,
    write_points_csv,
    write_projection_csv,
)
from .planner import (
    ModePlan,
    PathSample,
    PlanReport,
    discretize,
    plan_modes,
    read_path_csv,
    validate_plan,
    write_plan_csv,
)
from .scissor import ScissorDesign, design_scissor, scissor_length, shaft_position
from .singularity import (
    bracket_roots,
    bisect_root,
    extract_surface,
    line_concurrency_residual,
    line_concurrency_residuals,
    refine_brackets,
    singularity_value,
    singularity_values,
)
from .workspace import (
    MembershipReport,
    OracleResult,
    RegularWorkspaceSpec,
    WorkspaceRequirements,
    boundary_value,
    boundary_values,
    contains,
    contains_mask,
    default_workspace_box,
    regular_workspace_oracle,
    regular_workspace_requirements,
    workspace_mesh,
)

__version__ = "1.0.0"

__all__ = [
    "ActuationMode",
    "ClutchScheme",
    "DomainError",
    "InconsistentSensorsError",
    "InfeasibleDesignError",
    "InfeasiblePathError",
    "JacobianPair",
    "JointLimitError",
    "JointState",
    "MODE_TABLE",
    "MembershipReport",
    "ModePlan",
    "OracleResult",
    "PathSample",
    "PlanReport",
    "Pose",
    "RegularWorkspaceSpec",
    "RobotGeometry",
    "RobotModelError",
    "ScissorDesign",
    "SerialSingularityError",
    "SingularTransmissionError",
    "SurfaceMesh",
    "UnsupportedGeometryError",
    "WorkspaceRequirements",
    "boundary_value",
    "boundary_values",
    "bisect_root",
    "bracket_roots",
    "constraint_residuals",
    "contains",
    "contains_mask",
    "default_workspace_box",
    "design_scissor",
    "discretize",
    "extract_surface",
    "filter_vertices",
    "forward_kinematics_sensors",
    "inverse_kinematics",
    "isosurface",
    "jacobians",
    "leg_lengths",
    "line_concurrency_residual",
    "line_concurrency_residuals",
    "merge_meshes",
    "mesh_projections",
    "mode_from_clutches",
    "mode_table",
    "normalize_angle",
    "normalized_margin",
    "plan_modes",
    "platform_anchors",
    "read_path_csv",
    "refine_brackets",
    "regular_workspace_oracle",
    "regular_workspace_requirements",
    "rotation_matrix",
    "scissor_length",
    "shaft_position",
    "singularity_value",
    "singularity_values",
    "transmission_margins",
    "validate_plan",
    "velocity_transmission",
    "workspace_mesh",
    "write_obj",
    "write_plan_csv",
    "write_points_csv",
    "write_projection_csv",
]
