"""Analytic transmission solution for a homogeneous disk (Mie-type series).

Independent of the volume-integral pipeline: separation of variables for a
penetrable disk of radius a with interior wavenumber kappa_in embedded in a
kappa0 background, incident plane wave exp(i kappa0 d.x).  Used to verify the
Galerkin solver end to end at constant contrast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import special_functions as sf
from .errors import ResourceError, SingularityError
from .quadrature import triangle_quadrature

_TAIL_TOL = 1e-12
_NMAX_CAP = 160


@dataclass(frozen=True)
class DiskScatterer:
    radius: float
    kappa_in: float
    kappa0: float
    nmax: int | None = None

    def __post_init__(self):
        if self.radius <= 0.0 or self.kappa_in <= 0.0 or self.kappa0 <= 0.0:
            raise ValueError("radius and wavenumbers must be positive")


@dataclass(frozen=True)
class MieSolution:
    """Per-order coefficients for n = 0..nmax (negative orders by symmetry)."""

    scatterer: DiskScatterer
    theta_d: float  # incident direction angle
    nmax: int
    interior: np.ndarray  # a_n: coefficients of J_n(kappa_in r)
    scattered: np.ndarray  # b_n: coefficients of H_n^(1)(kappa0 r)
    residual: float  # worst 2x2 system residual


def _jy_derivative(table: np.ndarray) -> np.ndarray:
    """Z'_n from a table of Z_0..Z_{nmax+1} via Z'_n = (Z_{n-1} - Z_{n+1})/2."""
    d = np.empty(table.shape[0] - 1, dtype=table.dtype)
    d[0] = -table[1]
    d[1:] = 0.5 * (table[:-2] - table[2:])
    return d


def _coefficient_tables(sc: DiskScatterer, nmax: int):
    """Solve the 2x2 continuity systems for all orders 0..nmax at once."""
    a, kin, k0 = sc.radius, sc.kappa_in, sc.kappa0
    j_in = sf.jn_table(nmax + 1, np.array([kin * a]))[:, 0]
    j_out = sf.jn_table(nmax + 1, np.array([k0 * a]))[:, 0]
    y_out = sf.yn_table(nmax + 1, np.array([k0 * a]))[:, 0]
    h_out = j_out + 1j * y_out
    dj_in = _jy_derivative(j_in)
    dj_out = _jy_derivative(j_out)
    dh_out = _jy_derivative(h_out)
    j_in, j_out, h_out = j_in[:-1], j_out[:-1], h_out[:-1]

    ns = np.arange(nmax + 1)
    inc = 1j**ns
    # unknowns (a_n, b_n): a_n J_n(kin a) - b_n H_n(k0 a) = inc J_n(k0 a)
    #                      a_n kin J'_n(kin a) - b_n k0 H'_n(k0 a) = inc k0 J'_n(k0 a)
    det = j_in * (-k0 * dh_out) - (-h_out) * (kin * dj_in)
    scale = np.abs(j_in * k0 * dh_out) + np.abs(h_out * kin * dj_in)
    if np.any(np.abs(det) <= 1e-14 * np.maximum(scale, 1e-300)):
        raise SingularityError("interior resonance: singular continuity system")
    r1 = inc * j_out
    r2 = inc * k0 * dj_out
    a_n = (r1 * (-k0 * dh_out) - (-h_out) * r2) / det
    b_n = (j_in * r2 - r1 * kin * dj_in) / det
    res1 = np.abs(a_n * j_in - b_n * h_out - r1)
    res2 = np.abs(a_n * kin * dj_in - b_n * k0 * dh_out - r2)
    return a_n, b_n, float(np.max(res1 + res2))


def mie_solve(sc: DiskScatterer, direction=(1.0, 0.0)) -> MieSolution:
    """Transmission coefficients with adaptive truncation of the series."""
    d = np.asarray(direction, dtype=float)
    theta_d = float(np.arctan2(d[1], d[0]))
    if sc.nmax is not None:
        nmax = int(sc.nmax)
        a_n, b_n, res = _coefficient_tables(sc, nmax)
        return MieSolution(sc, theta_d, nmax, a_n, b_n, res)
    nmax = max(8, int(np.ceil(sc.kappa0 * sc.radius + sc.kappa_in * sc.radius)) + 8)
    while True:
        a_n, b_n, res = _coefficient_tables(sc, nmax)
        ref = max(np.abs(b_n).max(), np.abs(a_n).max(), 1.0)
        tail = max(abs(b_n[-1]), abs(b_n[-2])) / ref
        if tail < _TAIL_TOL:
            return MieSolution(sc, theta_d, nmax, a_n, b_n, res)
        nmax *= 2
        if nmax > _NMAX_CAP:
            raise ResourceError("Mie series does not converge below the order cap")


def _polar(sol: MieSolution, x: np.ndarray):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    r = np.linalg.norm(x, axis=1)
    theta = np.arctan2(x[:, 1], x[:, 0]) - sol.theta_d
    return x, r, theta


def _cos_series(coeff: np.ndarray, radial: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """sum_n eps_n c_n Z_n(r) cos(n theta), eps_0 = 1, eps_n = 2."""
    ns = np.arange(coeff.size)
    eps = np.where(ns == 0, 1.0, 2.0)
    return np.einsum("n,np,np->p", eps * coeff, radial, np.cos(np.outer(ns, theta)))


def mie_scattered(sol: MieSolution, x) -> np.ndarray:
    """Scattered part b_n H_n^(1)(kappa0 r), valid for r >= a."""
    sc = sol.scatterer
    x, r, theta = _polar(sol, x)
    arg = sc.kappa0 * r
    h = sf.jn_table(sol.nmax, arg) + 1j * sf.yn_table(sol.nmax, arg)
    return _cos_series(sol.scattered, h, theta)


def mie_eval(sol: MieSolution, x) -> np.ndarray:
    """Total field: interior series for r < a, incident + scattered outside."""
    sc = sol.scatterer
    x, r, theta = _polar(sol, x)
    out = np.empty(r.size, dtype=complex)
    inside = r < sc.radius
    if inside.any():
        j = sf.jn_table(sol.nmax, sc.kappa_in * r[inside])
        out[inside] = _cos_series(sol.interior, j, theta[inside])
    if (~inside).any():
        d = np.array([np.cos(sol.theta_d), np.sin(sol.theta_d)])
        uinc = np.exp(1j * sc.kappa0 * (x[~inside] @ d))
        out[~inside] = uinc + mie_scattered(sol, x[~inside])
    return out


def mie_interior_gradient(sol: MieSolution, x) -> np.ndarray:
    """Cartesian gradient of the interior series, shape (npts, 2)."""
    sc = sol.scatterer
    x, r, theta = _polar(sol, x)
    if np.any(r >= sc.radius):
        raise SingularityError("interior gradient requested outside the disk")
    rs = np.maximum(r, 1e-12)
    arg = sc.kappa_in * rs
    j = sf.jn_table(sol.nmax + 1, arg)
    dj = np.empty((sol.nmax + 1, rs.size), dtype=float)
    dj[0] = -j[1]
    dj[1:] = 0.5 * (j[:-2] - j[2:])
    ns = np.arange(sol.nmax + 1)
    eps = np.where(ns == 0, 1.0, 2.0)
    c = eps * sol.interior
    cosn = np.cos(np.outer(ns, theta))
    sinn = np.sin(np.outer(ns, theta))
    du_dr = sc.kappa_in * np.einsum("n,np,np->p", c, dj, cosn)
    du_dth = -np.einsum("n,np,np->p", c * ns, j[:-1], sinn)
    th = theta + sol.theta_d
    ct, st = np.cos(th), np.sin(th)
    gx = du_dr * ct - du_dth * st / rs
    gy = du_dr * st + du_dth * ct / rs
    return np.column_stack([gx, gy])


def compare_to_galerkin(
    level: int,
    kappa_in: float = 2.0,
    kappa0: float = 1.0,
    quad_order: int = 4,
    near_threshold: float = 0.5,
    duffy_points: int | None = None,
    direction=(1.0, 0.0),
) -> dict:
    """Relative L2 and H1-seminorm errors of the Galerkin field vs this oracle.

    Constant-contrast unit disk: the discrete solution on the disk mesh at the
    given level against the analytic series, both integrated with the element
    quadrature rule.  Returns {'h', 'l2_error', 'h1_error'}.
    """
    from . import assembly, mesh, solver

    disk = mesh.unit_disk_mesh(level)
    space = assembly.P1Space(disk)
    beta = kappa_in**2 - kappa0**2
    u_inc = assembly.plane_wave(kappa0, direction)
    quad = triangle_quadrature(quad_order)
    system = assembly.assemble_system(
        space, kappa0, lambda x: np.full(x.shape[0], beta), u_inc, quad,
        near_threshold, duffy_points,
    )
    coeffs = solver.solve_ls(system)

    sol = mie_solve(DiskScatterer(1.0, kappa_in, kappa0), direction)
    corners = disk.corners()
    areas = disk.signed_areas()
    pts = np.einsum("qk,tkd->tqd", quad.points, corners)
    wts = areas[:, None] * quad.weights[None, :]
    flat = pts.reshape(-1, 2)
    # polygon vertices sit on the circle, so interior quadrature points stay
    # strictly inside; clamp defensively against roundoff
    rr = np.linalg.norm(flat, axis=1)
    flat = np.where(rr[:, None] >= 1.0, flat * (1.0 - 1e-12) / rr[:, None], flat)
    exact = mie_eval(sol, flat).reshape(wts.shape)
    exact_grad = mie_interior_gradient(sol, flat).reshape(pts.shape)

    local = coeffs[disk.triangles]  # (T, 3)
    uh = np.einsum("qk,tk->tq", quad.points, local)
    # constant P1 gradients per triangle from the affine map
    e1 = corners[:, 1] - corners[:, 0]
    e2 = corners[:, 2] - corners[:, 0]
    inv_det = 1.0 / (2.0 * areas)
    g1 = np.stack([e2[:, 1], -e2[:, 0]], axis=1) * inv_det[:, None]
    g2 = np.stack([-e1[:, 1], e1[:, 0]], axis=1) * inv_det[:, None]
    g0 = -g1 - g2
    grad_uh = (
        local[:, 0, None] * g0 + local[:, 1, None] * g1 + local[:, 2, None] * g2
    )  # (T, 2)

    l2_num = np.sum(wts * np.abs(uh - exact) ** 2)
    l2_den = np.sum(wts * np.abs(exact) ** 2)
    diff_grad = grad_uh[:, None, :] - exact_grad
    h1_num = np.sum(wts[:, :, None] * np.abs(diff_grad) ** 2)
    h1_den = np.sum(wts[:, :, None] * np.abs(exact_grad) ** 2)
    return {
        "h": float(mesh.mesh_size(disk)),
        "l2_error": float(np.sqrt(l2_num / l2_den)),
        "h1_error": float(np.sqrt(h1_num / h1_den)),
    }
