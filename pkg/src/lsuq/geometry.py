"""Parametric star-shaped domain family.

The boundary radius is a truncated Fourier-type expansion

    rho_y(phi) = base + theta * sum_{j=1..J} j^{-zeta} (y_{2j} cos(j phi)
                                                        + y_{2j-1} sin(j phi)),

with y in [-1,1]^{2J} (1-based indexing: odd entries multiply sines, even
entries cosines).  Points of the closed reference disk are mapped radially by
r_y(xhat) = (rho_y(phi)/base) * xhat, whose Jacobian determinant is the
squared radial scaling q(phi)^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateShapeError, DimensionError

DEFAULT_RHO_FLOOR = 1e-3


@dataclass(frozen=True)
class RadiusModel:
    """Truncated radius expansion: amplitude theta, decay zeta, J Fourier modes."""

    theta: float
    zeta: float
    modes: int
    base_radius: float = 1.0
    # Large-deformation guard: for big theta the truncated expansion can dip
    # below zero for some parameter vectors, where the star-shaped map is
    # undefined.  A positive clamp_floor truncates the radius there so studies
    # over the full parameter box have a total integrand; None keeps the exact
    # expansion (and lets validation reject degenerate shapes).
    clamp_floor: float | None = None

    def __post_init__(self):
        if self.theta <= 0.0:
            raise ValueError("theta must be positive")
        if self.clamp_floor is not None and self.clamp_floor <= 0.0:
            raise ValueError("clamp_floor must be positive when set")
        if self.zeta <= 1.0:
            raise ValueError("zeta must exceed 1 (summability of the expansion)")
        if self.modes < 1:
            raise ValueError("at least one Fourier mode required")
        if self.base_radius <= 0.0:
            raise ValueError("base radius must be positive")

    @property
    def dimension(self) -> int:
        """Number of scalar parameters s = 2 * modes."""
        return 2 * self.modes

    def check_params(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.dimension,):
            raise DimensionError(
                f"parameter vector has length {y.shape}, expected ({self.dimension},)"
            )
        return y

    def coefficient_bounds(self) -> np.ndarray:
        """W^{1,inf}-type bounds b_j = theta*(1+ceil(j/2))*ceil(j/2)^{-zeta}, 1-based j."""
        j = np.arange(1, self.dimension + 1)
        mode = np.ceil(j / 2.0)
        return self.theta * (1.0 + mode) * mode ** (-self.zeta)


@dataclass(frozen=True)
class ShapeSample:
    """A validated shape: model, parameter vector, observed radius minimum."""

    model: RadiusModel
    y: np.ndarray
    rho_min_observed: float


def radius(model: RadiusModel, y: np.ndarray, phi) -> np.ndarray | float:
    """Boundary radius rho_y(phi); phi may be a scalar or an array."""
    y = model.check_params(y)
    phi_arr = np.atleast_1d(np.asarray(phi, dtype=float))
    j = np.arange(1, model.modes + 1)
    amp = model.theta * j ** (-model.zeta)
    c_sin = amp * y[0::2]
    c_cos = amp * y[1::2]
    # accumulate the Fourier sum by rotating e^{i j phi} instead of building
    # (npts, modes) trig matrices; this dominates the per-sample solve cost
    rot = np.exp(1j * phi_arr)
    cur = rot.copy()
    vals = np.full(phi_arr.shape, model.base_radius)
    for k in range(model.modes):
        vals += c_cos[k] * cur.real + c_sin[k] * cur.imag
        if k + 1 < model.modes:
            cur *= rot
    if model.clamp_floor is not None:
        np.maximum(vals, model.clamp_floor, out=vals)
    return vals if np.ndim(phi) else float(vals[0])


def _angles(xhat: np.ndarray) -> np.ndarray:
    """atan2 angles with the convention phi(0) := 0."""
    xhat = np.atleast_2d(xhat)
    phi = np.arctan2(xhat[:, 1], xhat[:, 0])
    phi[(xhat[:, 0] == 0.0) & (xhat[:, 1] == 0.0)] = 0.0
    return phi


def scaling(model: RadiusModel, y: np.ndarray, xhat: np.ndarray) -> np.ndarray:
    """Radial scaling q(phi) = rho_y(phi)/base at the angles of xhat (rows)."""
    phi = _angles(xhat)
    return np.asarray(radius(model, y, phi)) / model.base_radius


def transform(model: RadiusModel, y: np.ndarray, xhat: np.ndarray) -> np.ndarray:
    """Map reference points (rows of xhat, or a single 2-vector) to the physical domain."""
    single = np.ndim(xhat) == 1
    pts = np.atleast_2d(np.asarray(xhat, dtype=float))
    out = pts * scaling(model, y, pts)[:, None]
    return out[0] if single else out


def inverse_transform(model: RadiusModel, y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Pull physical points back to the reference disk (radial scaling inverse)."""
    single = np.ndim(x) == 1
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    out = pts / scaling(model, y, pts)[:, None]
    return out[0] if single else out


def jacobian_det(model: RadiusModel, y: np.ndarray, xhat: np.ndarray) -> np.ndarray | float:
    """det D r_y = q(phi)^2: the angular gradient of q is orthogonal to xhat."""
    single = np.ndim(xhat) == 1
    q = scaling(model, y, np.atleast_2d(np.asarray(xhat, dtype=float)))
    out = q * q
    return float(out[0]) if single else out


def validate_shape(
    model: RadiusModel,
    y: np.ndarray,
    grid_size: int = 256,
    rho_floor: float = DEFAULT_RHO_FLOOR,
) -> ShapeSample:
    """Check rho_y > rho_floor on a uniform angular grid; error on degenerate shapes."""
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    y = model.check_params(y)
    phi = np.linspace(0.0, 2.0 * np.pi, grid_size, endpoint=False)
    rho = np.asarray(radius(model, y, phi))
    rho_min = float(rho.min())
    if rho_min <= rho_floor:
        raise DegenerateShapeError(
            f"min rho_y = {rho_min:.6g} <= floor {rho_floor:g} (degenerate shape)"
        )
    return ShapeSample(model=model, y=y, rho_min_observed=rho_min)


def kappa_squared(frame: str, xhat=None, x_phys=None, kappa0: float = 1.0):
    """Squared wavenumber field kappa^2; equals kappa0^2 outside the inclusion.

    frame='material': kappa = 2 + |xhat|^2/2 on the closed reference disk,
    transported with the deformation.  frame='spatial': same formula read at
    the physical point.  Accepts (n,2) arrays or single 2-vectors.
    """
    if frame == "material":
        pts = xhat
    elif frame == "spatial":
        pts = x_phys
    else:
        raise ValueError(f"unknown frame {frame!r}; use 'material' or 'spatial'")
    single = np.ndim(pts) == 1
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    r2 = np.sum(pts * pts, axis=1)
    vals = (2.0 + 0.5 * r2) ** 2
    if frame == "material":
        # the inhomogeneity lives on the closed reference disk only
        vals = np.where(r2 <= 1.0 + 1e-12, vals, kappa0**2)
    out = vals
    return float(out[0]) if single else out
