"""Exterior field via the representation formula and the observation map.

For x outside the inclusion the total field is
u(x) = u_inc(x) + int_D G^{(kappa0)}(x - y) beta(y) u_h(y) dy;
the kernel is smooth there, so plain element Gauss quadrature suffices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import special_functions as sf
from .assembly import _quad_geometry
from .errors import ProximityError
from .quadrature import TriangleQuadrature, triangle_quadrature
from .solver import DiscreteSolution

DEFAULT_OBS_COUNT = 10
DEFAULT_OBS_RADIUS = 2.0


@dataclass(frozen=True)
class ObservationSetup:
    """Exterior measurement points; default ring of 10 on the radius-2 circle."""

    points: np.ndarray
    kappa0: float

    @classmethod
    def ring(
        cls,
        kappa0: float,
        count: int = DEFAULT_OBS_COUNT,
        radius: float = DEFAULT_OBS_RADIUS,
        phase: float = 0.0,
    ) -> "ObservationSetup":
        ang = phase + 2.0 * np.pi * np.arange(count) / count
        pts = radius * np.column_stack([np.cos(ang), np.sin(ang)])
        return cls(points=pts, kappa0=kappa0)

    @property
    def count(self) -> int:
        return self.points.shape[0]


def exterior_eval(
    solution: DiscreteSolution,
    kappa0: float,
    beta_at,
    u_inc,
    x,
    quad: TriangleQuadrature | None = None,
) -> np.ndarray:
    """Representation-formula field at exterior points, shape (npts,)."""
    if quad is None:
        quad = triangle_quadrature(4)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    mesh = solution.space.mesh
    pts, wts = _quad_geometry(mesh, quad)
    flat = pts.reshape(-1, 2)
    r = np.linalg.norm(x[:, None, :] - flat[None, :, :], axis=2)
    # the smooth rule is only valid with clearance from the source elements
    clearance = 0.25 * mesh.diameters().min()
    if np.any(r.min(axis=1) < clearance):
        bad = int(np.argmin(r.min(axis=1)))
        raise ProximityError(
            f"evaluation point {tuple(x[bad])} is inside or too close to the mesh"
        )
    uh = np.einsum("qk,tk->tq", quad.points, solution.coefficients[mesh.triangles])
    dens = wts * np.asarray(beta_at(flat)).reshape(wts.shape) * uh
    kern = sf.green2d_array(kappa0, r)
    return np.asarray(u_inc(x)) + kern @ dens.reshape(-1)


def observe(
    solution: DiscreteSolution,
    setup: ObservationSetup,
    beta_at,
    u_inc,
    quad: TriangleQuadrature | None = None,
) -> np.ndarray:
    """Stacked (Re_1, Im_1, ..., Re_K, Im_K) of the field at the setup points."""
    vals = exterior_eval(solution, setup.kappa0, beta_at, u_inc, setup.points, quad)
    out = np.empty(2 * setup.count)
    out[0::2] = vals.real
    out[1::2] = vals.imag
    return out
