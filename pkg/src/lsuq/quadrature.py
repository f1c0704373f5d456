"""Symmetric Gauss rules on the reference triangle (barycentric form)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError


@dataclass(frozen=True)
class TriangleQuadrature:
    """Barycentric points (nq, 3) and weights summing to 1 (scaled by area at use)."""

    order: int
    points: np.ndarray
    weights: np.ndarray


def _orbit3(a: float) -> np.ndarray:
    b = 1.0 - 2.0 * a
    return np.array([[b, a, a], [a, b, a], [a, a, b]])


def _orbit6(a: float, b: float) -> np.ndarray:
    c = 1.0 - a - b
    return np.array(
        [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
    )


def triangle_quadrature(order: int) -> TriangleQuadrature:
    """Dunavant-type rules exact to the requested polynomial degree (2, 4, 6)."""
    if order == 2:
        pts = _orbit3(1.0 / 6.0)
        wts = np.full(3, 1.0 / 3.0)
    elif order == 4:
        pts = np.vstack([_orbit3(0.445948490915965), _orbit3(0.091576213509771)])
        wts = np.concatenate(
            [np.full(3, 0.223381589678011), np.full(3, 0.109951743655322)]
        )
    elif order == 6:
        pts = np.vstack(
            [
                _orbit3(0.063089014491502),
                _orbit3(0.249286745170910),
                _orbit6(0.053145049844817, 0.310352451033784),
            ]
        )
        wts = np.concatenate(
            [
                np.full(3, 0.050844906370207),
                np.full(3, 0.116786275726379),
                np.full(6, 0.082851075618374),
            ]
        )
    else:
        raise QuadratureError(f"unsupported quadrature order {order}; use 2, 4, or 6")
    return TriangleQuadrature(order=order, points=pts, weights=wts)


def gauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w
