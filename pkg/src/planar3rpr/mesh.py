"""Triangle meshes of implicit surfaces in (x, y, alpha) space.

Marching cubes provides the topology; every emitted vertex is then refined by
bisection along its grid edge against the exact continuous field, so vertices
satisfy |field| <= mesh_tol * scale instead of merely linear interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from skimage.measure import marching_cubes

from .errors import DomainError

CSV_HEADER = "x,y,alpha,mode"


@dataclass(frozen=True)
class SurfaceMesh:
    """Triangle mesh with one integer label per vertex (e.g. mode or face id)."""

    vertices: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    faces: np.ndarray = field(default_factory=lambda: np.empty((0, 3), dtype=np.int64))
    labels: np.ndarray = field(default_factory=lambda: np.empty((0,), dtype=np.int64))

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        f = np.asarray(self.faces, dtype=np.int64)
        if v.size == 0:
            v = v.reshape(0, 3)
        if f.size == 0:
            f = f.reshape(0, 3)
        if v.ndim != 2 or v.shape[1] != 3:
            raise DomainError("vertices must be an (N, 3) array")
        if f.ndim != 2 or f.shape[1] != 3:
            raise DomainError("faces must be an (M, 3) array")
        lab = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if lab.shape[0] != v.shape[0]:
            raise DomainError("one label per vertex required")
        if f.size and (f.min() < 0 or f.max() >= v.shape[0]):
            raise DomainError("face indices out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        object.__setattr__(self, "labels", lab)

    @property
    def is_empty(self) -> bool:
        return self.vertices.shape[0] == 0

    def merged_with(self, other: "SurfaceMesh") -> "SurfaceMesh":
        return merge_meshes([self, other])


def merge_meshes(meshes) -> SurfaceMesh:
    """Concatenate meshes, offsetting face indices."""
    verts, faces, labels, offset = [], [], [], 0
    for m in meshes:
        if m.is_empty:
            continue
        verts.append(m.vertices)
        faces.append(m.faces + offset)
        labels.append(m.labels)
        offset += m.vertices.shape[0]
    if not verts:
        return SurfaceMesh()
    return SurfaceMesh(
        np.concatenate(verts), np.concatenate(faces), np.concatenate(labels)
    )


def isosurface(values, axes, field_fn, mesh_tol: float = 1e-6, mask=None, label: int = 0) -> SurfaceMesh:
    """Zero level set of a scalar field sampled on a rectilinear grid.

    values : (nx, ny, nz) samples of the field at the grid nodes.
    axes : three 1-D coordinate arrays (monotone increasing).
    field_fn : callable mapping (K, 3) points to (K,) exact field values,
        used to refine each vertex along its grid edge.
    mesh_tol : relative residual target for the refinement; vertices end with
        |field| <= mesh_tol * max(|field at edge endpoints|).
    mask : optional boolean (nx, ny, nz) array; cells with any corner outside
        the mask produce no geometry.
    label : integer stored for every vertex.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 3:
        raise DomainError("values must be a 3-D grid")
    if len(axes) != 3 or any(len(axes[k]) != values.shape[k] for k in range(3)):
        raise DomainError("axes must be three 1-D arrays matching the grid shape")
    if mesh_tol <= 0.0:
        raise DomainError(f"mesh_tol must be positive, got {mesh_tol}")
    if not (np.min(values) < 0.0 < np.max(values)):
        return SurfaceMesh(labels=np.empty((0,), dtype=np.int64))
    if mask is not None and not np.any(mask):
        return SurfaceMesh(labels=np.empty((0,), dtype=np.int64))
    try:
        verts, faces, _, _ = marching_cubes(values, level=0.0, mask=mask)
    except (ValueError, RuntimeError):
        # No surface intersects the (masked) grid.
        return SurfaceMesh(labels=np.empty((0,), dtype=np.int64))
    if verts.shape[0] == 0:
        return SurfaceMesh(labels=np.empty((0,), dtype=np.int64))

    verts = _refine_vertices(verts, values, axes, field_fn, mesh_tol)
    labels = np.full(verts.shape[0], int(label), dtype=np.int64)
    return SurfaceMesh(verts, faces.astype(np.int64), labels)


def _refine_vertices(verts_idx, values, axes, field_fn, mesh_tol):
    """Snap marching-cubes vertices onto the exact zero set along grid edges.

    Marching cubes places each vertex on a grid edge, at the linear
    interpolation of the endpoint samples; exactly one index coordinate is
    fractional. Bisection along that edge against the exact field replaces
    the interpolation error by mesh_tol-level residuals.
    """
    idx = np.asarray(verts_idx, dtype=float)
    frac = idx - np.floor(idx)
    is_frac = (frac > 1e-9) & (frac < 1.0 - 1e-9)
    n_frac = is_frac.sum(axis=1)

    # Physical coordinates of the interpolated vertices (fallback for
    # vertices sitting exactly on grid nodes).
    phys = np.column_stack(
        [np.interp(idx[:, k], np.arange(len(axes[k])), axes[k]) for k in range(3)]
    )

    todo = np.nonzero(n_frac == 1)[0]
    if todo.size == 0:
        return phys
    axis_of = np.argmax(is_frac[todo], axis=1)

    lo_idx = np.floor(idx[todo]).astype(int)
    hi_idx = lo_idx.copy()
    hi_idx[np.arange(todo.size), axis_of] += 1
    f_lo = values[tuple(lo_idx.T)]
    f_hi = values[tuple(hi_idx.T)]
    bracketed = f_lo * f_hi <= 0.0
    scale = np.maximum(np.maximum(np.abs(f_lo), np.abs(f_hi)), 1e-300)

    pt_lo = np.column_stack([axes[k][lo_idx[:, k]] for k in range(3)])
    pt_hi = np.column_stack([axes[k][hi_idx[:, k]] for k in range(3)])

    t_lo = np.zeros(todo.size)
    t_hi = np.ones(todo.size)
    v_lo = f_lo.copy()
    # Bisection halves the parameter interval each pass; 60 passes reach
    # machine resolution, the residual check allows stopping earlier.
    for _ in range(60):
        active = bracketed
        mid = 0.5 * (t_lo + t_hi)
        points = pt_lo + mid[:, None] * (pt_hi - pt_lo)
        fm = np.asarray(field_fn(points), dtype=float)
        if np.all(np.abs(fm[active]) <= mesh_tol * scale[active]):
            t_lo = np.where(active, mid, t_lo)
            t_hi = np.where(active, mid, t_hi)
            break
        left = v_lo * fm <= 0.0
        t_hi = np.where(active & left, mid, t_hi)
        t_lo = np.where(active & ~left, mid, t_lo)
        v_lo = np.where(active & ~left, fm, v_lo)
    t = 0.5 * (t_lo + t_hi)
    refined = pt_lo + t[:, None] * (pt_hi - pt_lo)
    phys[todo[bracketed]] = refined[bracketed]
    return phys


def filter_vertices(mesh: SurfaceMesh, keep) -> SurfaceMesh:
    """Drop vertices where ``keep`` is False, plus every face touching them."""
    keep = np.asarray(keep, dtype=bool).reshape(-1)
    if keep.shape[0] != mesh.vertices.shape[0]:
        raise DomainError("keep mask must have one entry per vertex")
    if keep.all():
        return mesh
    new_index = np.cumsum(keep) - 1
    faces = mesh.faces[np.all(keep[mesh.faces], axis=1)] if mesh.faces.size else mesh.faces
    return SurfaceMesh(
        mesh.vertices[keep], new_index[faces], mesh.labels[keep]
    )


def write_obj(mesh: SurfaceMesh, path) -> None:
    """Write a mesh as Wavefront OBJ: 'v x y alpha' lines, 1-based 'f i j k'."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.12g} {v[1]:.12g} {v[2]:.12g}\n")
        for f3 in mesh.faces:
            fh.write(f"f {f3[0] + 1:d} {f3[1] + 1:d} {f3[2] + 1:d}\n")


def write_points_csv(mesh: SurfaceMesh, path) -> None:
    """Write mesh vertices as CSV with header x,y,alpha,mode."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for v, lab in zip(mesh.vertices, mesh.labels):
            fh.write(f"{v[0]:.12g},{v[1]:.12g},{v[2]:.12g},{int(lab):d}\n")


def mesh_projections(mesh: SurfaceMesh) -> dict:
    """Vertex projections onto the three coordinate planes.

    Returns {"xy": (N, 2), "xalpha": (N, 2), "yalpha": (N, 2)} arrays.
    """
    v = mesh.vertices
    return {
        "xy": v[:, [0, 1]].copy(),
        "xalpha": v[:, [0, 2]].copy(),
        "yalpha": v[:, [1, 2]].copy(),
    }


def write_projection_csv(points, columns, path) -> None:
    """Write a 2-D point set as CSV with the given two column names."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"{columns[0]},{columns[1]}\n")
        for p in pts:
            fh.write(f"{p[0]:.12g},{p[1]:.12g}\n")
