"""Structured triangulations of disks and annuli in polar coordinates.

Nodes are laid out on concentric circles with equally spaced angles
(radii are equally spaced too, apart from an optional geometric boundary
layer at the inner circle), so every boundary node sits exactly on its
circle (up to one ulp of cos/sin).  Each quadrilateral cell is split
into two triangles along the same diagonal, which keeps the mesh
invariant under rotation by one angular step -- a property the solver
tests lean on.

Node ordering is ring-major: index = ring * n_theta + column for annuli;
a disk additionally owns node 0 at the center, followed by the rings of
positive radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class NodeTag(IntEnum):
    INTERIOR = 0
    INNER = 1
    OUTER = 2


@dataclass(frozen=True, eq=False)
class PolarMesh:
    """Immutable triangle mesh of a disk or annulus.

    Attributes
    ----------
    n_r : number of radial cell layers (including any graded ones).
    n_theta : number of angular sectors.
    nodes : (N, 2) float array of vertex coordinates.
    triangles : (M, 3) int array of positively oriented vertex triples.
    node_tags : (N,) int array of NodeTag values.
    ring_radii : radii of the node circles, ascending; a disk's center
        counts as a ring of radius 0 holding a single node.
    areas : (M,) triangle areas.
    grads : (M, 2, 3) gradients of the three nodal hat functions on each
        triangle, cached for assembly.
    """

    r_in: float
    r_out: float
    n_r: int
    n_theta: int
    nodes: np.ndarray
    triangles: np.ndarray
    node_tags: np.ndarray
    ring_radii: np.ndarray
    areas: np.ndarray
    grads: np.ndarray

    # -- structure queries ------------------------------------------------

    @property
    def is_disk(self) -> bool:
        return self.r_in == 0.0

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def area_total(self) -> float:
        return float(np.sum(self.areas))

    @property
    def h_radial(self) -> float:
        """Largest radial spacing (the bulk spacing for graded meshes)."""
        return float(np.max(np.diff(self.ring_radii)))

    @property
    def h_max(self) -> float:
        """Largest element diameter (the mesh size of interpolation theory)."""
        corners = self.nodes[self.triangles]
        edges = corners - np.roll(corners, 1, axis=1)
        return float(np.sqrt(np.max(np.sum(edges * edges, axis=2))))

    def nodes_with_tag(self, tag: NodeTag) -> np.ndarray:
        return np.flatnonzero(self.node_tags == tag)

    def inner_nodes(self) -> np.ndarray:
        return self.nodes_with_tag(NodeTag.INNER)

    def outer_nodes(self) -> np.ndarray:
        return self.nodes_with_tag(NodeTag.OUTER)

    def interior_nodes(self) -> np.ndarray:
        return self.nodes_with_tag(NodeTag.INTERIOR)

    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.node_tags != NodeTag.INTERIOR)

    def node_radii(self) -> np.ndarray:
        return np.hypot(self.nodes[:, 0], self.nodes[:, 1])

    def node_angles(self) -> np.ndarray:
        return np.arctan2(self.nodes[:, 1], self.nodes[:, 0])

    def node_index(self, ring: int, col: int) -> int:
        """Index of the node on circle ``ring`` (0-based, ascending radius)
        at angular column ``col``."""
        col = col % self.n_theta
        if self.is_disk:
            if ring == 0:
                return 0
            return 1 + (ring - 1) * self.n_theta + col
        return ring * self.n_theta + col

    def ring_values(self, values: np.ndarray, ring: int) -> np.ndarray:
        """Nodal values along one circle, as an (n_theta,) array.  The
        center node of a disk is broadcast across all columns."""
        values = np.asarray(values)
        if self.is_disk and ring == 0:
            return np.full(self.n_theta, values[0])
        base = self.node_index(ring, 0)
        return values[base:base + self.n_theta]


def build_polar_mesh(r_in: float, r_out: float, n_r: int,
                     n_theta: int, *, inner_layers: int = 0) -> PolarMesh:
    """Triangulate the annulus r_in <= |x| <= r_out (a disk when r_in = 0).

    Parameters
    ----------
    r_in, r_out : inner and outer radii, 0 <= r_in < r_out.
    n_r : number of radial cell layers, >= 3.
    n_theta : number of angular sectors, >= 3.
    inner_layers : optional boundary-layer grading for annuli.  The first
        radial cell is subdivided this many times by repeated halving
        toward the inner circle, so the innermost cell has width
        h / 2**inner_layers while the bulk spacing stays h.  Use it when
        the solution has a steep gradient at the inner boundary; the
        reported ``h_radial`` remains the bulk spacing.

    Returns
    -------
    PolarMesh with one node ring per radius for an annulus; a disk swaps
    the degenerate inner circle for a single center node.
    """
    if not (0.0 <= r_in < r_out):
        raise ValueError(f"need 0 <= r_in < r_out, got r_in={r_in}, r_out={r_out}")
    if n_r < 3 or n_theta < 3:
        raise ValueError(f"need n_r >= 3 and n_theta >= 3, got {n_r}, {n_theta}")
    if inner_layers < 0:
        raise ValueError(f"inner_layers must be >= 0, got {inner_layers}")
    if inner_layers > 0 and r_in == 0.0:
        raise ValueError("inner boundary-layer grading needs an annulus")

    radii = np.linspace(r_in, r_out, n_r + 1)
    if inner_layers > 0:
        h0 = radii[1] - radii[0]
        splits = r_in + h0 * 0.5 ** np.arange(inner_layers, 0, -1)
        radii = np.concatenate([[r_in], splits, radii[1:]])
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    cos_t, sin_t = np.cos(theta), np.sin(theta)

    is_disk = r_in == 0.0
    nodes = []
    if is_disk:
        nodes.append(np.zeros((1, 2)))
        circle_radii = radii[1:]
    else:
        circle_radii = radii
    for r in circle_radii:
        nodes.append(np.column_stack([r * cos_t, r * sin_t]))
    nodes = np.vstack(nodes)

    n_cells = len(radii) - 1

    def idx(ring, col):
        col = col % n_theta
        if is_disk:
            return 0 if ring == 0 else 1 + (ring - 1) * n_theta + col
        return ring * n_theta + col

    tris = []
    if is_disk:
        for j in range(n_theta):
            tris.append((idx(0, 0), idx(1, j), idx(1, j + 1)))
        first_quad_ring = 1
    else:
        first_quad_ring = 0
    for i in range(first_quad_ring, n_cells):
        for j in range(n_theta):
            n00, n10 = idx(i, j), idx(i + 1, j)
            n11, n01 = idx(i + 1, j + 1), idx(i, j + 1)
            tris.append((n00, n10, n11))
            tris.append((n00, n11, n01))
    triangles = np.asarray(tris, dtype=np.int64)

    tags = np.full(len(nodes), NodeTag.INTERIOR, dtype=np.int8)
    if not is_disk:
        tags[:n_theta] = NodeTag.INNER
    tags[-n_theta:] = NodeTag.OUTER

    areas, grads = _triangle_geometry(nodes, triangles)
    if np.any(areas <= 0.0):
        raise ValueError("mesh construction produced a non-positive triangle")

    return PolarMesh(
        r_in=float(r_in), r_out=float(r_out), n_r=n_cells, n_theta=int(n_theta),
        nodes=nodes, triangles=triangles, node_tags=tags,
        ring_radii=radii, areas=areas, grads=grads,
    )


def _triangle_geometry(nodes, triangles):
    """Signed areas and hat-function gradients, vectorized over triangles."""
    p0 = nodes[triangles[:, 0]]
    p1 = nodes[triangles[:, 1]]
    p2 = nodes[triangles[:, 2]]
    v1 = p1 - p0
    v2 = p2 - p0
    det = v1[:, 0] * v2[:, 1] - v1[:, 1] * v2[:, 0]
    areas = 0.5 * det

    m = len(triangles)
    grads = np.empty((m, 2, 3))
    # gradients of the barycentric coordinates lambda_1, lambda_2
    grads[:, 0, 1] = v2[:, 1] / det
    grads[:, 1, 1] = -v2[:, 0] / det
    grads[:, 0, 2] = -v1[:, 1] / det
    grads[:, 1, 2] = v1[:, 0] / det
    grads[:, :, 0] = -(grads[:, :, 1] + grads[:, :, 2])
    return areas, grads


def same_mesh(m1: PolarMesh, m2: PolarMesh) -> bool:
    """True when two meshes triangulate the same nodes identically."""
    if m1 is m2:
        return True
    return (m1.nodes.shape == m2.nodes.shape
            and np.array_equal(m1.triangles, m2.triangles)
            and np.array_equal(m1.node_tags, m2.node_tags)
            and bool(np.all(np.abs(m1.nodes - m2.nodes) <= 1e-14)))


def rotate_columns(mesh: PolarMesh, values: np.ndarray, k: int) -> np.ndarray:
    """Values of the function rotated by k angular steps: the value at
    column j of the result is the input value at column j - k."""
    values = np.asarray(values)
    out = np.empty_like(values)
    n_t = mesh.n_theta
    rings = len(mesh.ring_radii)
    if mesh.is_disk:
        out[0] = values[0]
        start_ring = 1
    else:
        start_ring = 0
    for ring in range(start_ring, rings):
        base = mesh.node_index(ring, 0)
        block = values[base:base + n_t]
        out[base:base + n_t] = np.roll(block, k)
    return out


def radial_values(mesh: PolarMesh, values: np.ndarray, r: float) -> np.ndarray:
    """Evaluate a nodal field at radius r for every angular column.

    Along each ray of constant angle the mesh edges are radial segments,
    so the piecewise-affine field restricted to a ray is piecewise linear
    in the radius; linear interpolation between the bracketing circles is
    therefore exact for P1 fields.
    """
    radii = mesh.ring_radii
    if not (radii[0] - 1e-12 <= r <= radii[-1] + 1e-12):
        raise ValueError(f"radius {r} outside mesh range [{radii[0]}, {radii[-1]}]")
    r = min(max(r, radii[0]), radii[-1])
    hi = int(np.searchsorted(radii, r))
    if hi == 0:
        return mesh.ring_values(np.asarray(values), 0).copy()
    lo = hi - 1
    if hi == len(radii):
        return mesh.ring_values(np.asarray(values), len(radii) - 1).copy()
    w = (r - radii[lo]) / (radii[hi] - radii[lo])
    v_lo = mesh.ring_values(np.asarray(values), lo)
    v_hi = mesh.ring_values(np.asarray(values), hi)
    return (1.0 - w) * v_lo + w * v_hi
