"""P1 Galerkin assembly of the Lippmann-Schwinger system (M - A) u = b.

Assembly happens on the physical (pushforward) mesh, so the free-space kernel
G(x - y) is used directly and all domain-mapping Jacobians are absorbed into
element geometry.  Element pairs are split into a far set (tensorized Gauss
rules, evaluated as one big blocked kernel product) and a near set
(singularity-adapted rule: the source triangle is subdivided at the point of
the source triangle closest to each test quadrature node and each piece is
integrated with a Duffy-type collapsed tensor rule, which removes the
logarithmic singularity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import special_functions as sf
from .errors import QuadratureError
from .mesh import TriangleMesh
from .quadrature import TriangleQuadrature, gauss01

_R_TINY = 1e-14

# memory caps for the blocked products
_FAR_BLOCK_ENTRIES = 4_000_000
_NEAR_CHUNK = 1500


@dataclass(frozen=True)
class P1Space:
    """Nodal P1 space on a triangle mesh; one dof per vertex."""

    mesh: TriangleMesh

    @property
    def dof_count(self) -> int:
        return self.mesh.vertex_count


@dataclass
class ComplexLinearSystem:
    """Dense Galerkin system (M - A) u = b."""

    matrix: np.ndarray
    rhs: np.ndarray


def mass_matrix(space: P1Space) -> np.ndarray:
    """Exact P1 mass matrix on the physical mesh."""
    m = space.mesh
    areas = m.signed_areas()
    local = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    out = np.zeros((space.dof_count, space.dof_count))
    tri = m.triangles
    for a in range(3):
        for b in range(3):
            np.add.at(out, (tri[:, a], tri[:, b]), areas * local[a, b])
    return out


def _quad_geometry(m: TriangleMesh, quad: TriangleQuadrature):
    """Physical quadrature points (T, nq, 2) and area-scaled weights (T, nq)."""
    corners = m.corners()
    pts = np.einsum("qk,tkd->tqd", quad.points, corners)
    wts = m.signed_areas()[:, None] * quad.weights[None, :]
    return pts, wts


def rhs_vector(space: P1Space, u_inc, quad: TriangleQuadrature) -> np.ndarray:
    """b_i = int u_inc phi_i over the physical mesh by the element rule."""
    m = space.mesh
    pts, wts = _quad_geometry(m, quad)
    vals = np.asarray(u_inc(pts.reshape(-1, 2))).reshape(wts.shape)
    out = np.zeros(space.dof_count, dtype=complex)
    for a in range(3):
        np.add.at(out, m.triangles[:, a], np.sum(wts * vals * quad.points[None, :, a], axis=1))
    return out


def _masked_kernel(kernel, r: np.ndarray) -> np.ndarray:
    """kernel(r) with exact-zero distances mapped to 0 (corrected elsewhere)."""
    out = np.zeros(r.shape, dtype=complex)
    pos = r > _R_TINY
    if pos.any():
        out[pos] = kernel(r[pos])
    return out


def _dof_groups(dofs: np.ndarray, n: int):
    """Stable grouping of a flat dof-index array for np.add.reduceat."""
    order = np.argsort(dofs, kind="stable")
    starts = np.searchsorted(dofs[order], np.arange(n))
    return order, starts


def near_pairs(m: TriangleMesh, near_threshold: float) -> tuple[np.ndarray, np.ndarray]:
    """Element pairs whose separation is below near_threshold*(diam+diam').

    Uses the centroid distance minus a diameter padding as a conservative
    lower bound for the set distance, so the near set can only be larger
    than the exact criterion (accuracy-safe).
    """
    cent = m.centroids()
    diam = m.diameters()
    pad = near_threshold + 0.62
    tt_list, ss_list = [], []
    block = max(1, int(_FAR_BLOCK_ENTRIES // max(m.triangle_count, 1)))
    for t0 in range(0, m.triangle_count, block):
        t1 = min(t0 + block, m.triangle_count)
        d = np.linalg.norm(cent[t0:t1, None, :] - cent[None, :, :], axis=2)
        hit = d <= pad * (diam[t0:t1, None] + diam[None, :])
        tt, ss = np.nonzero(hit)
        tt_list.append(tt + t0)
        ss_list.append(ss)
    return np.concatenate(tt_list), np.concatenate(ss_list)


def _closest_point_on_triangle_boundary(x: np.ndarray, corners: np.ndarray) -> np.ndarray:
    """Closest point on the boundary of each triangle to each x.

    x: (..., 2); corners: (..., 3, 2) broadcast-compatible with x.
    """
    best_d2 = None
    best_p = None
    for k in range(3):
        a = corners[..., k, :]
        b = corners[..., (k + 1) % 3, :]
        e = b - a
        t = np.sum((x - a) * e, axis=-1) / np.sum(e * e, axis=-1)
        t = np.clip(t, 0.0, 1.0)
        p = a + t[..., None] * e
        d2 = np.sum((x - p) ** 2, axis=-1)
        if best_d2 is None:
            best_d2, best_p = d2, p
        else:
            take = d2 < best_d2
            best_d2 = np.where(take, d2, best_d2)
            best_p = np.where(take[..., None], p, best_p)
    return best_p


def _pair_local_tensor(ct, cs, kernel, beta_s, quad, wt_t, wt_s):
    """Tensor-rule local 3x3 blocks for explicit pairs (chunk form).

    ct, cs: (p, 3, 2) corner arrays; wt_t, wt_s: (p, nq) scaled weights;
    beta_s: (p, nq) contrast at the source quadrature points.
    """
    bary = quad.points
    xt = np.einsum("qk,pkd->pqd", bary, ct)
    xs = np.einsum("qk,pkd->pqd", bary, cs)
    r = np.linalg.norm(xt[:, :, None, :] - xs[:, None, :, :], axis=3)
    g = _masked_kernel(kernel, r)
    return np.einsum(
        "pq,qa,pqr,pr,rb->pab", wt_t, bary, g, wt_s * beta_s, bary, optimize=True
    )


def _pair_local_duffy(ct, cs, coincident, kernel, beta_at, quad, nd, wt_t):
    """Singularity-adapted local 3x3 blocks for explicit pairs (chunk form).

    For every outer Gauss node x on the test triangle, the source triangle is
    split into up to three triangles anchored at x (coincident pair) or at the
    boundary point of the source triangle closest to x; each piece uses an
    nd x nd collapsed (Duffy) Gauss rule whose Jacobian cancels the kernel's
    integrable singularity.
    """
    npair, nq = wt_t.shape
    bary = quad.points
    x = np.einsum("qk,pkd->pqd", bary, ct)  # (p, nq, 2)

    anchor = _closest_point_on_triangle_boundary(x, cs[:, None, :, :])
    if coincident.any():
        anchor[coincident] = x[coincident]

    # barycentric transform of the source triangles
    v0 = cs[:, 0, :]
    e1 = cs[:, 1, :] - v0
    e2 = cs[:, 2, :] - v0
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    inv = np.empty((npair, 2, 2))
    inv[:, 0, 0] = e2[:, 1] / det
    inv[:, 0, 1] = -e2[:, 0] / det
    inv[:, 1, 0] = -e1[:, 1] / det
    inv[:, 1, 1] = e1[:, 0] / det

    u, wu = gauss01(nd)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    wgrid = (np.outer(wu, wu) * uu).reshape(-1)  # Duffy factor u included
    uu = uu.reshape(-1)
    vv = vv.reshape(-1)

    inner = np.zeros((npair, nq, 3), dtype=complex)
    for k in range(3):
        vk = cs[:, k, :][:, None, :]
        vk1 = cs[:, (k + 1) % 3, :][:, None, :]
        d1 = vk - anchor  # (p, nq, 2)
        d2 = vk1 - anchor
        # p = anchor + u((1-v) d1 + v d2); |jac| = u * |d1 x d2|
        cross = np.abs(d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0])
        pts = (
            anchor[:, :, None, :]
            + uu[None, None, :, None]
            * ((1.0 - vv)[None, None, :, None] * d1[:, :, None, :]
               + vv[None, None, :, None] * d2[:, :, None, :])
        )  # (p, nq, nd2, 2)
        r = np.linalg.norm(x[:, :, None, :] - pts, axis=3)
        g = _masked_kernel(kernel, r)
        beta = np.asarray(beta_at(pts.reshape(-1, 2))).reshape(r.shape)
        rel = pts - v0[:, None, None, :]
        lam12 = np.einsum("pij,pqnj->pqni", inv, rel)
        lam = np.concatenate([1.0 - lam12.sum(axis=3, keepdims=True), lam12], axis=3)
        inner += np.einsum(
            "n,pq,pqn,pqnb->pqb", wgrid, cross, g * beta, lam, optimize=True
        )
    return np.einsum("pq,qa,pqb->pab", wt_t, bary, inner, optimize=True)


def vio_matrix(
    space: P1Space,
    kappa0: float,
    beta_at,
    quad: TriangleQuadrature,
    near_threshold: float = 0.5,
    duffy_points: int | None = None,
) -> np.ndarray:
    """Galerkin block of the volume integral operator.

    A_ij = int int G^{(kappa0)}(x - y) beta(y) phi_j(y) phi_i(x) dy dx
    over the physical mesh; beta_at maps physical points (n, 2) -> (n,).
    """
    m = space.mesh
    n = space.dof_count
    tri = m.triangles
    nt = m.triangle_count
    nq = quad.weights.size
    nd = duffy_points if duffy_points is not None else quad.order + 2

    kernel = lambda r: sf.green2d_array(kappa0, r)

    pts, wts = _quad_geometry(m, quad)
    beta = np.asarray(beta_at(pts.reshape(-1, 2))).reshape(nt, nq)

    flat_pts = pts.reshape(-1, 2)
    src = wts * beta  # (T, nq)

    dofs = tri.reshape(-1)  # entry t*3 + a -> tri[t, a]
    order, starts = _dof_groups(dofs, n)

    # far product: K[p, j] = sum_p' G(p, p') * src-weight(p', j)
    total = nt * nq
    K = np.zeros((total, n), dtype=complex)
    block = max(1, int(_FAR_BLOCK_ENTRIES // total))
    for r0 in range(0, total, block):
        r1 = min(r0 + block, total)
        r = np.linalg.norm(flat_pts[r0:r1, None, :] - flat_pts[None, :, :], axis=2)
        g = _masked_kernel(kernel, r)
        for b in range(3):
            tmp = (g * (src * quad.points[None, :, b]).reshape(-1)[None, :]).reshape(
                r1 - r0, nt, nq
            ).sum(axis=2)
            np.add.at(K[r0:r1].T, tri[:, b], tmp.T)
    # test-side contraction: rows grouped by dof
    tst = wts[:, :, None] * quad.points[None, :, :]
    flat_rows = np.einsum("tqa,tqn->tan", tst, K.reshape(nt, nq, n)).reshape(3 * nt, n)
    A = np.add.reduceat(flat_rows[order], starts, axis=0)

    # near corrections: replace the tensor value with the Duffy value
    tt, ss = near_pairs(m, near_threshold)
    corners = m.corners()
    for c0 in range(0, tt.size, _NEAR_CHUNK):
        sl = slice(c0, min(c0 + _NEAR_CHUNK, tt.size))
        t_idx, s_idx = tt[sl], ss[sl]
        ct, cs = corners[t_idx], corners[s_idx]
        tensor = _pair_local_tensor(
            ct, cs, kernel, beta[s_idx], quad, wts[t_idx], wts[s_idx]
        )
        duffy = _pair_local_duffy(
            ct, cs, t_idx == s_idx, kernel, beta_at, quad, nd, wts[t_idx]
        )
        delta = duffy - tensor
        for a in range(3):
            for b in range(3):
                np.add.at(A, (tri[t_idx, a], tri[s_idx, b]), delta[:, a, b])

    if not np.all(np.isfinite(A)):
        bad = np.argwhere(~np.isfinite(A))[0]
        raise QuadratureError(f"non-finite VIO entry at dof pair {tuple(bad)}")
    return A


def assemble_system(
    space: P1Space,
    kappa0: float,
    beta_at,
    u_inc,
    quad: TriangleQuadrature,
    near_threshold: float = 0.5,
    duffy_points: int | None = None,
) -> ComplexLinearSystem:
    """Full Galerkin system (M - A) u = b for the scattering problem."""
    mass = mass_matrix(space)
    vio = vio_matrix(space, kappa0, beta_at, quad, near_threshold, duffy_points)
    rhs = rhs_vector(space, u_inc, quad)
    return ComplexLinearSystem(matrix=mass - vio, rhs=rhs)


@dataclass(frozen=True)
class PlaneWave:
    """Incident field exp(i kappa0 d.x); picklable for worker pools."""

    kappa0: float
    direction: np.ndarray

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.exp(1j * self.kappa0 * (x @ self.direction))


def plane_wave(kappa0: float, direction=(1.0, 0.0)) -> PlaneWave:
    d = np.asarray(direction, dtype=float)
    return PlaneWave(kappa0=kappa0, direction=d / np.linalg.norm(d))


def pair_double_integral(
    corners_t, corners_s, kernel, quad: TriangleQuadrature, nd: int
) -> complex:
    """Plain double integral of kernel(|x-y|) over one element pair.

    Uses the singularity-adapted path; with beta = 1 the sum over all local
    P1 products collapses to the plain integral (partition of unity).
    """
    ct = np.asarray(corners_t, dtype=float)[None]
    cs = np.asarray(corners_s, dtype=float)[None]
    area_t = 0.5 * abs(
        (ct[0, 1, 0] - ct[0, 0, 0]) * (ct[0, 2, 1] - ct[0, 0, 1])
        - (ct[0, 2, 0] - ct[0, 0, 0]) * (ct[0, 1, 1] - ct[0, 0, 1])
    )
    wt = area_t * quad.weights[None, :]
    coincident = np.array([np.allclose(ct, cs)])
    local = _pair_local_duffy(
        ct, cs, coincident, kernel, lambda p: np.ones(p.shape[0]), quad, nd, wt
    )
    return complex(local.sum())
