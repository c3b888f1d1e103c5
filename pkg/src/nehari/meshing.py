"""P1 finite elements on the unit interval and the unit square.

Meshes are deliberately simple: uniform partitions of (0, 1) into segments or
of (0, 1)^2 into right triangles (each grid square split along one diagonal).
Piecewise-linear functions with zero boundary trace stand in for the energy
space; their gradients are cellwise constant, so all quadrature loops reduce
to dense numpy operations over (n_cells, n_qp) arrays.

Quadrature rules are stored in barycentric form.  Defaults: 2-point Gauss on
segments (degree 3), the 3-point edge-midpoint rule on triangles (degree 2).
A 1-point centroid rule is kept as an independent cross-check for tests.

The text mesh format is:

    dim n_vertices n_cells
    <n_vertices coordinate lines>
    <n_cells lines of dim+1 vertex indices, 0-based>

Boundary vertices are inferred topologically (facets incident to exactly one
cell), never from coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np


class MeshFormatError(ValueError):
    """Raised when a mesh file does not follow the text format above."""


_SQ3 = 1.0 / np.sqrt(3.0)

# name -> (barycentric points (nq, dim+1), weight fractions (nq,))
_RULES_1D = {
    "gauss2": (np.array([[0.5 * (1 + _SQ3), 0.5 * (1 - _SQ3)],
                         [0.5 * (1 - _SQ3), 0.5 * (1 + _SQ3)]]),
               np.array([0.5, 0.5])),
    "midpoint": (np.array([[0.5, 0.5]]), np.array([1.0])),
    "gauss3": (np.array([[0.5 * (1 + np.sqrt(0.6)), 0.5 * (1 - np.sqrt(0.6))],
                         [0.5, 0.5],
                         [0.5 * (1 - np.sqrt(0.6)), 0.5 * (1 + np.sqrt(0.6))]]),
               np.array([5.0, 8.0, 5.0]) / 18.0),
}
_RULES_2D = {
    "midedge": (np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]),
                np.array([1.0, 1.0, 1.0]) / 3.0),
    "centroid": (np.array([[1.0, 1.0, 1.0]]) / 3.0, np.array([1.0])),
}
DEFAULT_RULE = {1: "gauss2", 2: "midedge"}


def _rule(dim: int, name: str):
    table = _RULES_1D if dim == 1 else _RULES_2D
    if name not in table:
        raise ValueError(f"unknown {dim}-d quadrature rule {name!r}; "
                         f"have {sorted(table)}")
    return table[name]


@dataclass(frozen=True)
class Mesh:
    """Simplicial mesh with a fixed quadrature rule baked in."""

    dim: int
    vertices: np.ndarray        # (nv, dim)
    cells: np.ndarray           # (nc, dim+1) int
    boundary: np.ndarray        # sorted boundary vertex ids
    interior: np.ndarray        # sorted interior vertex ids
    cell_measure: np.ndarray    # (nc,)
    basis_grads: np.ndarray     # (nc, dim+1, dim)
    qbary: np.ndarray           # (nq, dim+1)
    qp: np.ndarray              # (nc, nq, dim)
    qw: np.ndarray              # (nc, nq)
    quadrature: str

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def measure(self) -> float:
        return float(self.cell_measure.sum())

    @property
    def qp_flat(self) -> np.ndarray:
        """Quadrature points as an (nc*nq, dim) array."""
        return self.qp.reshape(-1, self.dim)

    def with_quadrature(self, name: str) -> "Mesh":
        qbary, wfrac = _rule(self.dim, name)
        qp = np.einsum("qk,ckd->cqd", qbary, self.vertices[self.cells])
        qw = self.cell_measure[:, None] * wfrac[None, :]
        return replace(self, qbary=qbary, qp=qp, qw=qw, quadrature=name)

    def __repr__(self):
        return (f"Mesh(dim={self.dim}, {self.n_vertices} vertices, "
                f"{self.n_cells} cells, quadrature={self.quadrature!r})")


def _finish_mesh(dim, vertices, cells, quadrature):
    vertices = np.asarray(vertices, dtype=float).reshape(-1, dim)
    cells = np.asarray(cells, dtype=np.int64).reshape(-1, dim + 1)
    if cells.min(initial=0) < 0 or cells.max(initial=-1) >= vertices.shape[0]:
        raise MeshFormatError("cell refers to a vertex that does not exist")

    coords = vertices[cells]                      # (nc, dim+1, dim)
    if dim == 1:
        h = coords[:, 1, 0] - coords[:, 0, 0]
        # orient left-to-right so the measure is positive
        flip = h < 0
        if np.any(flip):
            cells = cells.copy()
            cells[flip] = cells[flip][:, ::-1]
            coords = vertices[cells]
            h = coords[:, 1, 0] - coords[:, 0, 0]
        measure = h
        grads = np.empty((cells.shape[0], 2, 1))
        grads[:, 0, 0] = -1.0 / h
        grads[:, 1, 0] = 1.0 / h
    else:
        e1 = coords[:, 1] - coords[:, 0]
        e2 = coords[:, 2] - coords[:, 0]
        det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        flip = det < 0
        if np.any(flip):
            cells = cells.copy()
            cells[flip] = cells[flip][:, [0, 2, 1]]
            coords = vertices[cells]
            e1 = coords[:, 1] - coords[:, 0]
            e2 = coords[:, 2] - coords[:, 0]
            det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        measure = 0.5 * det
        # gradients of the reference barycentric basis pushed forward
        inv = np.empty((cells.shape[0], 2, 2))
        inv[:, 0, 0] = e2[:, 1] / det
        inv[:, 0, 1] = -e2[:, 0] / det
        inv[:, 1, 0] = -e1[:, 1] / det
        inv[:, 1, 1] = e1[:, 0] / det
        ref = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])  # (3, 2)
        grads = np.einsum("kr,crd->ckd", ref, inv)
    if np.any(measure <= 0):
        bad = int(np.argmax(measure <= 0))
        raise MeshFormatError(f"degenerate cell {bad} with measure {measure[bad]:.3e}")

    boundary = _infer_boundary(dim, vertices.shape[0], cells)
    interior = np.setdiff1d(np.arange(vertices.shape[0]), boundary)
    qbary, wfrac = _rule(dim, quadrature)
    qp = np.einsum("qk,ckd->cqd", qbary, vertices[cells])
    qw = measure[:, None] * wfrac[None, :]
    return Mesh(dim, vertices, cells, boundary, interior, measure, grads,
                qbary, qp, qw, quadrature)


def _infer_boundary(dim, n_vertices, cells):
    if dim == 1:
        counts = np.bincount(cells.ravel(), minlength=n_vertices)
        return np.flatnonzero(counts == 1)
    edges = np.concatenate([cells[:, [0, 1]], cells[:, [1, 2]], cells[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    on_bnd = np.zeros(n_vertices, dtype=bool)
    on_bnd[uniq[counts == 1].ravel()] = True
    return np.flatnonzero(on_bnd)


def interval_mesh(n_cells: int, quadrature: str | None = None) -> Mesh:
    """Uniform mesh of (0, 1) with ``n_cells`` segments."""
    if n_cells < 2:
        raise ValueError("need at least 2 cells for a nonempty interior")
    x = np.linspace(0.0, 1.0, n_cells + 1)
    cells = np.column_stack([np.arange(n_cells), np.arange(1, n_cells + 1)])
    return _finish_mesh(1, x[:, None], cells, quadrature or DEFAULT_RULE[1])


def rect_mesh(nx: int, ny: int | None = None, quadrature: str | None = None) -> Mesh:
    """Uniform triangulation of (0, 1)^2; each grid square is split in two."""
    ny = nx if ny is None else ny
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 subdivisions per direction")
    xs = np.linspace(0.0, 1.0, nx + 1)
    ys = np.linspace(0.0, 1.0, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return i * (ny + 1) + j

    cells = []
    for i in range(nx):
        for j in range(ny):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            cells.append((v00, v10, v11))
            cells.append((v00, v11, v01))
    return _finish_mesh(2, vertices, np.array(cells), quadrature or DEFAULT_RULE[2])


def read_mesh(path, quadrature: str | None = None) -> Mesh:
    """Load a mesh from the plain text format described in the module docs."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    if not lines:
        raise MeshFormatError(f"{path}: empty mesh file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 3:
        raise MeshFormatError(f"{path}:{lineno}: header must be 'dim n_vertices n_cells'")
    try:
        dim, nv, nc = (int(p) for p in parts)
    except ValueError as exc:
        raise MeshFormatError(f"{path}:{lineno}: non-integer header field") from exc
    if dim not in (1, 2):
        raise MeshFormatError(f"{path}:{lineno}: dim must be 1 or 2, got {dim}")
    if len(lines) != 1 + nv + nc:
        raise MeshFormatError(
            f"{path}: expected {1 + nv + nc} content lines, found {len(lines)}")
    vertices = np.empty((nv, dim))
    for row, (lineno, ln) in enumerate(lines[1:1 + nv]):
        try:
            vals = [float(t) for t in ln.split()]
        except ValueError as exc:
            raise MeshFormatError(f"{path}:{lineno}: bad coordinate") from exc
        if len(vals) != dim:
            raise MeshFormatError(f"{path}:{lineno}: expected {dim} coordinates")
        vertices[row] = vals
    cells = np.empty((nc, dim + 1), dtype=np.int64)
    for row, (lineno, ln) in enumerate(lines[1 + nv:]):
        try:
            ids = [int(t) for t in ln.split()]
        except ValueError as exc:
            raise MeshFormatError(f"{path}:{lineno}: bad vertex index") from exc
        if len(ids) != dim + 1:
            raise MeshFormatError(f"{path}:{lineno}: expected {dim + 1} vertex ids")
        cells[row] = ids
    return _finish_mesh(dim, vertices, cells, quadrature or DEFAULT_RULE[dim])


# ----------------------------------------------------------------------
# P1 functions
# ----------------------------------------------------------------------

class FeFunction:
    """Piecewise-linear function with zero trace on the mesh boundary."""

    __slots__ = ("mesh", "values")

    def __init__(self, mesh: Mesh, values, enforce_boundary: bool = True):
        values = np.array(values, dtype=float)
        if values.shape != (mesh.n_vertices,):
            raise ValueError(f"expected {mesh.n_vertices} nodal values, "
                             f"got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("nodal values must be finite")
        if enforce_boundary:
            values[mesh.boundary] = 0.0
        elif np.any(values[mesh.boundary] != 0.0):
            raise ValueError("boundary dofs must be exactly zero")
        self.mesh = mesh
        self.values = values

    @classmethod
    def zero(cls, mesh: Mesh) -> "FeFunction":
        return cls(mesh, np.zeros(mesh.n_vertices), enforce_boundary=False)

    def at_qp(self) -> np.ndarray:
        """Values at quadrature points, shape (nc, nq)."""
        return self.values[self.mesh.cells] @ self.mesh.qbary.T

    def grad(self) -> np.ndarray:
        """Cellwise constant gradient, shape (nc, dim)."""
        vc = self.values[self.mesh.cells]            # (nc, dim+1)
        return np.einsum("ckd,ck->cd", self.mesh.basis_grads, vc)

    def grad_mag(self) -> np.ndarray:
        """|grad u| per cell, shape (nc,)."""
        g = self.grad()
        return np.sqrt(np.einsum("cd,cd->c", g, g))

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[self.mesh.interior]

    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0.0))

    # light arithmetic; boundary dofs stay zero under all of these
    def __add__(self, other):
        self._same_mesh(other)
        return FeFunction(self.mesh, self.values + other.values, enforce_boundary=False)

    def __sub__(self, other):
        self._same_mesh(other)
        return FeFunction(self.mesh, self.values - other.values, enforce_boundary=False)

    def __mul__(self, t):
        return FeFunction(self.mesh, float(t) * self.values, enforce_boundary=False)

    __rmul__ = __mul__

    def __neg__(self):
        return FeFunction(self.mesh, -self.values, enforce_boundary=False)

    def __abs__(self):
        return FeFunction(self.mesh, np.abs(self.values), enforce_boundary=False)

    def _same_mesh(self, other):
        if not isinstance(other, FeFunction) or other.mesh is not self.mesh:
            raise ValueError("operands must live on the same mesh")

    def __repr__(self):
        return f"FeFunction(n={self.values.size}, max|u|={np.abs(self.values).max():.4g})"


def qp_values(mesh: Mesh, nodal: np.ndarray) -> np.ndarray:
    """Evaluate a plain nodal vector at all quadrature points, (nc, nq)."""
    nodal = np.asarray(nodal, dtype=float)
    return nodal[mesh.cells] @ mesh.qbary.T


def integrate(mesh: Mesh, field) -> float:
    """Quadrature sum of a (nc, nq) field; (nc,) fields broadcast per cell."""
    field = np.asarray(field, dtype=float)
    if field.ndim == 1:
        field = field[:, None]
    if field.shape[0] != mesh.n_cells:
        raise ValueError("field shape does not match the mesh")
    return float(np.sum(mesh.qw * field))


def nodal_interpolate(mesh: Mesh, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Vertex interpolant of fn as a plain array (no boundary condition)."""
    return np.asarray(fn(mesh.vertices), dtype=float).reshape(mesh.n_vertices)


def fe_interpolate(mesh: Mesh, fn) -> FeFunction:
    """Vertex interpolant with the zero trace enforced."""
    return FeFunction(mesh, nodal_interpolate(mesh, fn))


def sine_mode(mesh: Mesh) -> FeFunction:
    """Interpolant of the product of first sine modes; positive inside."""
    if mesh.dim == 1:
        return fe_interpolate(mesh, lambda x: np.sin(np.pi * x[:, 0]))
    return fe_interpolate(
        mesh, lambda x: np.sin(np.pi * x[:, 0]) * np.sin(np.pi * x[:, 1]))


def random_fe_function(mesh: Mesh, rng: np.random.Generator,
                       kind: str = "smooth", n_modes: int = 4) -> FeFunction:
    """Seeded random P1 functions used throughout the property checks.

    kind = "smooth": a random low-mode sine series (sign changing),
    kind = "nodal": iid standard normal interior values,
    kind = "positive": uniform(0.2, 1) interior values, a rough positive bump.
    """
    if kind == "nodal":
        vals = np.zeros(mesh.n_vertices)
        vals[mesh.interior] = rng.standard_normal(mesh.interior.size)
        return FeFunction(mesh, vals, enforce_boundary=False)
    if kind == "positive":
        vals = np.zeros(mesh.n_vertices)
        vals[mesh.interior] = rng.uniform(0.2, 1.0, mesh.interior.size)
        return FeFunction(mesh, vals, enforce_boundary=False)
    if kind != "smooth":
        raise ValueError(f"unknown random function kind {kind!r}")
    x = mesh.vertices
    vals = np.zeros(mesh.n_vertices)
    for k in range(1, n_modes + 1):
        if mesh.dim == 1:
            vals += rng.standard_normal() / k * np.sin(k * np.pi * x[:, 0])
        else:
            for l in range(1, n_modes + 1):
                vals += (rng.standard_normal() / (k * k + l * l)
                         * np.sin(k * np.pi * x[:, 0]) * np.sin(l * np.pi * x[:, 1]))
    return FeFunction(mesh, vals)
