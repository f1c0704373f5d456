"""Direct solution of the dense Galerkin system and P1 field evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .assembly import ComplexLinearSystem, P1Space
from .errors import PointLocationError, SolverError
from .mesh import triangle_adjacency

RESIDUAL_TOL = 1e-10
_BARY_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteSolution:
    """Nodal P1 field on the physical mesh."""

    space: P1Space
    coefficients: np.ndarray

    def __post_init__(self):
        if self.coefficients.shape != (self.space.dof_count,):
            raise SolverError("coefficient vector length does not match dof count")

    @cached_property
    def _adjacency(self) -> np.ndarray:
        return triangle_adjacency(self.space.mesh)


def solve_ls(
    system: ComplexLinearSystem,
    method: str = "direct",
    iter_tol: float = RESIDUAL_TOL,
) -> np.ndarray:
    """Solve the dense system; direct LU by default, restarted GMRES optionally.

    The direct path adds one step of iterative refinement.  Raises SolverError
    (with a condition estimate) when the relative residual does not reach
    RESIDUAL_TOL (direct) or iter_tol (iterative).
    """
    mat = system.matrix
    b = system.rhs
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or b.shape != (mat.shape[0],):
        raise SolverError("system is not square or rhs length mismatches")
    if method == "iterative":
        x, info = scipy.sparse.linalg.gmres(mat, b, rtol=iter_tol, restart=200)
        if info != 0:
            raise SolverError(f"iterative solve did not converge (info={info})")
        tol = iter_tol
    elif method == "direct":
        try:
            lu, piv = scipy.linalg.lu_factor(mat)
        except scipy.linalg.LinAlgError as exc:
            raise SolverError(f"factorization failed: {exc}") from exc
        x = scipy.linalg.lu_solve((lu, piv), b)
        x = x + scipy.linalg.lu_solve((lu, piv), b - mat @ x)
        tol = RESIDUAL_TOL
    else:
        raise SolverError(f"unknown solver method {method!r}; use direct or iterative")
    scale = np.linalg.norm(b)
    residual = np.linalg.norm(b - mat @ x)
    rel = residual / scale if scale > 0.0 else residual
    if not np.isfinite(rel) or rel > tol:
        cond = np.linalg.cond(mat)
        raise SolverError(
            f"relative residual {rel:.3e} above {tol:.1e} "
            f"(condition estimate {cond:.3e})"
        )
    return x


def _barycentric(corners: np.ndarray, x: np.ndarray) -> np.ndarray:
    mat = np.column_stack([corners[1] - corners[0], corners[2] - corners[0]])
    lam12 = np.linalg.solve(mat, x - corners[0])
    return np.array([1.0 - lam12.sum(), lam12[0], lam12[1]])


def locate(solution: DiscreteSolution, x_phys, hint: int = 0) -> tuple[int, np.ndarray]:
    """Point location by walking across edges; brute-force scan as fallback."""
    mesh = solution.space.mesh
    corners = mesh.corners()
    adj = solution._adjacency
    x = np.asarray(x_phys, dtype=float)
    t = int(hint)
    visited = set()
    for _ in range(mesh.triangle_count):
        lam = _barycentric(corners[t], x)
        worst = int(np.argmin(lam))
        if lam[worst] >= -_BARY_TOL:
            return t, lam
        visited.add(t)
        nxt = int(adj[t, worst])
        if nxt < 0 or nxt in visited:
            break
        t = nxt
    # the physical domain need not be convex, so the walk can hit the boundary
    for t in range(mesh.triangle_count):
        lam = _barycentric(corners[t], x)
        if lam.min() >= -_BARY_TOL:
            return t, lam
    raise PointLocationError(f"point {tuple(x)} lies outside the mesh")


def evaluate(solution: DiscreteSolution, x_phys, hint: int = 0) -> complex:
    """Barycentric-linear interpolation of the discrete field at a point."""
    t, lam = locate(solution, x_phys, hint)
    dofs = solution.space.mesh.triangles[t]
    return complex(np.dot(lam, solution.coefficients[dofs]))
