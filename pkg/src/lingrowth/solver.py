"""Piecewise-affine minimization of linear-growth energies on polar meshes.

The discrete problem: among nodal fields u matching prescribed Dirichlet
values on the boundary circles, minimize

    E(u) = sum over triangles of  area(T) * g(|grad u|_T).

Strict convexity of g makes E strictly convex in the interior unknowns, so
the minimizer is unique and is found by a damped Newton iteration with an
Armijo backtracking line search.  Per-triangle flux and tangent blocks come
straight from the density: with p the triangle gradient and t = |p|,

    flux     = g'(t) p / t                      (g''(0) * p at p = 0)
    tangent  = g''(t) P + (g'(t)/t) (I - P),    P = p p^T / t^2,

both symmetric positive definite thanks to g'' > 0 and g' increasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .density import Density
from .mesh import PolarMesh, same_mesh


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 200
    grad_tol: float = 1e-10
    armijo_c: float = 1e-4
    armijo_factor: float = 0.5
    energy_stall_rtol: float = 1e-14

    @staticmethod
    def from_config(cfg: dict) -> "SolverOptions":
        known = {"max_iter", "grad_tol", "armijo_c", "armijo_factor"}
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown solver options: {sorted(unknown)}")
        return SolverOptions(**{k: cfg[k] for k in known if k in cfg})


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    """A solved nodal field with its convergence diagnostics.

    ``values`` covers every node; boundary entries carry the prescribed
    data exactly.  ``energy_history`` records the energy after each
    accepted step (monotonically non-increasing).
    """

    mesh: PolarMesh
    values: np.ndarray
    energy: float
    grad_norm: float
    iterations: int
    converged: bool
    energy_history: tuple = ()

    def diagnostics(self) -> dict:
        return {
            "energy": self.energy,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("node,x,y,value\n")
            for i, ((x, y), v) in enumerate(zip(self.mesh.nodes, self.values)):
                fh.write(f"{i},{x:.12g},{y:.12g},{v:.12g}\n")


class NonConvergenceError(RuntimeError):
    """Newton iteration hit its cap; carries the best solution found."""

    def __init__(self, message: str, solution: DiscreteSolution):
        super().__init__(message)
        self.solution = solution


class MeshMismatchError(ValueError):
    """Two fields that must share a mesh do not."""


@dataclass(frozen=True)
class ComparisonResult:
    """Outcome of a discrete comparison-principle check.

    ``applicable`` is False when the boundary ordering hypothesis fails,
    which is a different outcome from an interior violation.
    ``max_violation`` is the largest interior excess u - v - shift
    (negative when the ordering holds strictly).
    """

    holds: bool
    max_violation: float
    applicable: bool = True


# ---------------------------------------------------------------------------
# assembly


def _triangle_gradients(mesh: PolarMesh, u: np.ndarray) -> np.ndarray:
    """(M, 2) array of per-triangle gradients of the P1 field u.

    The first vertex value is subtracted before contracting with the hat
    gradients (their sum vanishes, so this changes nothing analytically);
    rounding then scales with the local variation of u instead of its
    absolute offset, which keeps gradient norms meaningful for fields
    sitting far from zero.
    """
    ut = u[mesh.triangles]                      # (M, 3)
    ut = ut - ut[:, :1]
    return np.einsum("mik,mk->mi", mesh.grads, ut)


def energy(d: Density, mesh: PolarMesh, u: np.ndarray) -> float:
    """Total energy sum(area * g(|grad u|)) of a nodal field."""
    p = _triangle_gradients(mesh, np.asarray(u, dtype=float))
    t = np.hypot(p[:, 0], p[:, 1])
    return float(np.dot(mesh.areas, d.g(t)))


def _flux_coefficients(d: Density, t: np.ndarray):
    """c1 = g'(t)/t extended by g''(0) at t = 0, and c2 = g''(t)."""
    gp = np.asarray(d.gprime(t), dtype=float)
    c2 = np.asarray(d.gsecond(t), dtype=float)
    c1 = np.empty_like(c2)
    pos = t > 0.0
    c1[pos] = gp[pos] / t[pos]
    c1[~pos] = float(d.gsecond(0.0))
    return c1, c2


def assemble_gradient(d: Density, mesh: PolarMesh, u: np.ndarray) -> np.ndarray:
    """Nodal gradient of the energy (all nodes, boundary rows included)."""
    p = _triangle_gradients(mesh, u)
    t = np.hypot(p[:, 0], p[:, 1])
    c1, _ = _flux_coefficients(d, t)
    flux = c1[:, None] * p                       # (M, 2)
    contrib = np.einsum("m,mik,mi->mk", mesh.areas, mesh.grads, flux)
    out = np.zeros(mesh.num_nodes)
    np.add.at(out, mesh.triangles.ravel(), contrib.ravel())
    return out


def assemble_hessian(d: Density, mesh: PolarMesh, u: np.ndarray) -> sp.csr_matrix:
    """Sparse energy Hessian at u (full node set)."""
    p = _triangle_gradients(mesh, u)
    t = np.hypot(p[:, 0], p[:, 1])
    c1, c2 = _flux_coefficients(d, t)

    m = mesh.num_triangles
    H = np.zeros((m, 2, 2))
    H[:, 0, 0] = H[:, 1, 1] = c1
    safe = np.where(t > 0.0, t, 1.0)
    ph = p / safe[:, None]
    coef = np.where(t > 0.0, c2 - c1, 0.0)
    H[:, 0, 0] += coef * ph[:, 0] * ph[:, 0]
    H[:, 0, 1] = H[:, 1, 0] = coef * ph[:, 0] * ph[:, 1]
    H[:, 1, 1] += coef * ph[:, 1] * ph[:, 1]

    blocks = np.einsum("m,mki,mkl,mlj->mij", mesh.areas, mesh.grads, H,
                       mesh.grads)               # (M, 3, 3)
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    A = sp.coo_matrix((blocks.ravel(), (rows, cols)),
                      shape=(mesh.num_nodes, mesh.num_nodes))
    return A.tocsr()


def residual_EL(d: Density, mesh: PolarMesh, values: np.ndarray) -> float:
    """Euclidean norm of the interior-restricted energy gradient: the
    discrete Euler-Lagrange residual of a nodal field."""
    grad = assemble_gradient(d, mesh, np.asarray(values, dtype=float))
    return float(np.linalg.norm(grad[mesh.interior_nodes()]))


# ---------------------------------------------------------------------------
# Dirichlet solve


def _boundary_vector(mesh: PolarMesh, boundary_data) -> np.ndarray:
    """Full nodal vector with boundary entries filled from the data map."""
    bnodes = mesh.boundary_nodes()
    u = np.zeros(mesh.num_nodes)
    if isinstance(boundary_data, dict):
        missing = [int(i) for i in bnodes if int(i) not in boundary_data]
        if missing:
            raise ValueError(
                f"boundary data missing for {len(missing)} node(s), "
                f"first few: {missing[:5]}")
        for i in bnodes:
            u[i] = float(boundary_data[int(i)])
    else:
        arr = np.asarray(boundary_data, dtype=float)
        if arr.shape != (mesh.num_nodes,):
            raise ValueError(
                "boundary data must be a dict over boundary nodes or a "
                f"full nodal vector of length {mesh.num_nodes}")
        u[bnodes] = arr[bnodes]
    if not np.all(np.isfinite(u[bnodes])):
        raise ValueError("boundary data contains non-finite values")
    return u


def _harmonic_extension(d: Density, mesh: PolarMesh, u: np.ndarray,
                        interior: np.ndarray) -> np.ndarray:
    """Initial guess: discrete harmonic extension weighted by the flat
    tangent g''(0) * Id (one sparse linear solve)."""
    K = assemble_hessian(d, mesh, np.zeros(mesh.num_nodes))
    K_ii = K[interior][:, interior]
    rhs = -(K[interior] @ u - K_ii @ u[interior])
    out = u.copy()
    out[interior] = spsolve(K_ii.tocsc(), rhs)
    return out


def solve_dirichlet(d: Density, mesh: PolarMesh, boundary_data,
                    opts: Optional[SolverOptions] = None) -> DiscreteSolution:
    """Minimize the discrete energy subject to Dirichlet boundary values.

    Parameters
    ----------
    d : normalized Density.
    mesh : PolarMesh.
    boundary_data : dict node_index -> value covering every boundary node,
        or a full nodal vector whose boundary entries are used.
    opts : SolverOptions, optional.

    Returns
    -------
    DiscreteSolution with converged=True; convergence means the interior
    gradient norm fell below grad_tol * (1 + |energy|) or the energy
    decrement stalled below the relative floor.

    Raises
    ------
    NonConvergenceError
        If the iteration cap is exceeded; the partial solution rides along
        on the exception.
    ValueError
        For incomplete boundary data, a non-normalized density, or
        non-finite initial energy.
    """
    if d.gprime_inf != 1.0:
        raise ValueError("solver requires a normalized density")
    opts = opts or SolverOptions()

    interior = mesh.interior_nodes()
    u = _boundary_vector(mesh, boundary_data)
    u = _harmonic_extension(d, mesh, u, interior)

    E = energy(d, mesh, u)
    if not math.isfinite(E):
        raise ValueError(f"non-finite initial energy {E}")

    history = [E]
    grad_norm = math.inf
    for it in range(opts.max_iter):
        grad = assemble_gradient(d, mesh, u)
        g_i = grad[interior]
        grad_norm = float(np.linalg.norm(g_i))
        if grad_norm <= opts.grad_tol * (1.0 + abs(E)):
            return DiscreteSolution(mesh=mesh, values=u, energy=E,
                                    grad_norm=grad_norm, iterations=it,
                                    converged=True,
                                    energy_history=tuple(history))

        K = assemble_hessian(d, mesh, u)
        K_ii = K[interior][:, interior].tocsc()
        step = spsolve(K_ii, -g_i)
        if float(np.dot(step, g_i)) >= 0.0:
            step = -g_i  # Newton direction unusable; fall back downhill

        u_new, E_new, ok = _armijo(d, mesh, u, interior, step, g_i, E, opts)
        if not ok:
            # Newton direction exhausted the line search; one gradient try
            u_new, E_new, ok = _armijo(d, mesh, u, interior, -g_i, g_i, E, opts)
        if ok:
            u, E_prev, E = u_new, E, E_new
            history.append(E)
            if abs(E_prev - E) < opts.energy_stall_rtol * (1.0 + abs(E_prev)):
                grad = assemble_gradient(d, mesh, u)
                grad_norm = float(np.linalg.norm(grad[interior]))
                # a stalled energy only counts as convergence once the
                # gradient meets the advertised tolerance; otherwise give
                # the iteration another chance to push it down
                if grad_norm <= opts.grad_tol * (1.0 + abs(E)):
                    return DiscreteSolution(mesh=mesh, values=u, energy=E,
                                            grad_norm=grad_norm,
                                            iterations=it + 1,
                                            converged=True,
                                            energy_history=tuple(history))
        else:
            # neither direction made progress: we are numerically stationary
            grad = assemble_gradient(d, mesh, u)
            grad_norm = float(np.linalg.norm(grad[interior]))
            if grad_norm <= opts.grad_tol * (1.0 + abs(E)):
                return DiscreteSolution(mesh=mesh, values=u, energy=E,
                                        grad_norm=grad_norm, iterations=it + 1,
                                        converged=True,
                                        energy_history=tuple(history))
            partial = DiscreteSolution(mesh=mesh, values=u, energy=E,
                                       grad_norm=grad_norm, iterations=it + 1,
                                       converged=False,
                                       energy_history=tuple(history))
            raise NonConvergenceError(
                f"line search stalled at gradient norm {grad_norm:.3e} "
                f"above tolerance", partial)

    partial = DiscreteSolution(mesh=mesh, values=u, energy=E,
                               grad_norm=grad_norm, iterations=opts.max_iter,
                               converged=False, energy_history=tuple(history))
    raise NonConvergenceError(
        f"no convergence in {opts.max_iter} iterations "
        f"(grad_norm={grad_norm:.3e}, energy={E:.12g})", partial)


def _armijo(d, mesh, u, interior, direction, g_i, E, opts):
    """Backtracking line search; returns (u_new, E_new, accepted)."""
    slope = float(np.dot(direction, g_i))
    step = 1.0
    trial = u.copy()
    while step >= 1e-14:
        trial[interior] = u[interior] + step * direction
        E_trial = energy(d, mesh, trial)
        if E_trial <= E + opts.armijo_c * step * slope:
            return trial, E_trial, True
        step *= opts.armijo_factor
    return u, E, False


# ---------------------------------------------------------------------------
# comparison principle checking


def check_comparison(u: DiscreteSolution, v: DiscreteSolution, shift: float,
                     tol: Optional[float] = None) -> ComparisonResult:
    """Check the discrete comparison principle between two solved fields.

    If u <= v + shift at every boundary node, reports the maximal
    interior excess max(u - v - shift) and whether it stays below the
    tolerance (default 1e-8 * (1 + |shift|)).  When the boundary
    hypothesis itself fails the result is marked not applicable instead
    of violated.
    """
    if not same_mesh(u.mesh, v.mesh):
        raise MeshMismatchError("comparison requires a shared mesh")
    if tol is None:
        tol = 1e-8 * (1.0 + abs(shift))

    mesh = u.mesh
    bnodes = mesh.boundary_nodes()
    gap_b = u.values[bnodes] - v.values[bnodes] - shift
    if np.any(gap_b > 0.0):
        return ComparisonResult(holds=False, max_violation=math.nan,
                                applicable=False)

    inodes = mesh.interior_nodes()
    gap_i = u.values[inodes] - v.values[inodes] - shift
    max_violation = float(np.max(gap_i))
    return ComparisonResult(holds=bool(max_violation <= tol),
                            max_violation=max_violation)
