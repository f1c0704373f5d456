"""Real-argument Bessel/Hankel functions and the 2D Helmholtz fundamental solution.

Self-contained implementation: power series for small arguments (x < 12),
Hankel asymptotic expansions with phase functions for large arguments, Miller
downward recurrence for J_n at high order and upward recurrence for Y_n.
Array variants (`j0v`, `y0v`, ..., `green2d_array`) are the hot path for
Galerkin assembly and are fully vectorized.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, SingularityError, UnsupportedOrderError

EULER_GAMMA = 0.5772156649015328606

ORDER_CAP = 200

# Crossover between power series and asymptotic expansion.
_SMALL = 12.0

# Series length: at x = 12 the largest dropped term is far below 1e-16.
_NSER = 46

# Precomputed series coefficients (index k).
_INV_KFACT_SQ = np.array([1.0 / (math.factorial(k) ** 2) for k in range(_NSER)])
_INV_K_KP1 = np.array(
    [1.0 / (math.factorial(k) * math.factorial(k + 1)) for k in range(_NSER)]
)
_HARMONIC = np.zeros(_NSER + 1)
for _k in range(1, _NSER + 1):
    _HARMONIC[_k] = _HARMONIC[_k - 1] + 1.0 / _k

# Y0 series: (2/pi) * sum_{k>=1} (-1)^{k+1} H_k z^k / (k!)^2
_Y0_COEF = np.array(
    [(-1.0) ** (k + 1) * _HARMONIC[k] * _INV_KFACT_SQ[k] for k in range(_NSER)]
)
# Y1 series: sum_k (-z)^k (H_k + H_{k+1}) / (k! (k+1)!)
_Y1_COEF = np.array(
    [(-1.0) ** k * (_HARMONIC[k] + _HARMONIC[k + 1]) * _INV_K_KP1[k] for k in range(_NSER)]
)
_J0_COEF = np.array([(-1.0) ** k * _INV_KFACT_SQ[k] for k in range(_NSER)])
_J1_COEF = np.array([(-1.0) ** k * _INV_K_KP1[k] for k in range(_NSER)])

# Number of terms in the asymptotic P/Q sums; at x = 12 the smallest term
# is ~1e-15 (terms decrease until k ~ 4x).
_NASY = 18


def _poly_eval(coef: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Horner evaluation of sum_k coef[k] z^k.

    The series are alternating with factorial-square decay, so for small z
    most of the 46 tabulated terms are far below double precision; truncating
    at 18 terms keeps the dropped term under 1e-20 whenever z < 4.  This is
    the hottest scalar loop in Galerkin assembly.
    """
    if z.size and z.max() < 4.0:
        coef = coef[:18]
    acc = np.full_like(z, coef[-1])
    for c in coef[-2::-1]:
        acc = acc * z + c
    return acc


def _asymptotic_pq(mu: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Phase-function sums P, Q of the large-argument Hankel expansion.

    mu = 4 n^2.  Valid for x >= _SMALL.
    """
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = np.ones_like(x)  # running term t_k / (k! (8x)^k)
    sign_p = -1.0
    sign_q = 1.0
    for k in range(1, _NASY):
        a = a * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if k % 2 == 0:
            p = p + sign_p * a
            sign_p = -sign_p
        else:
            q = q + sign_q * a
            sign_q = -sign_q
    return p, q


def _jy_large(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(J_n, Y_n) for n in {0,1} via the asymptotic expansion, x >= _SMALL."""
    p, q = _asymptotic_pq(4.0 * n * n, x)
    chi = x - (2 * n + 1) * (math.pi / 4.0)
    amp = np.sqrt(2.0 / (math.pi * x))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _j0_small(x: np.ndarray) -> np.ndarray:
    return _poly_eval(_J0_COEF, 0.25 * x * x)


def _j1_small(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * _poly_eval(_J1_COEF, 0.25 * x * x)


def _y0_small(x: np.ndarray) -> np.ndarray:
    z = 0.25 * x * x
    return (2.0 / math.pi) * (
        (np.log(0.5 * x) + EULER_GAMMA) * _j0_small(x) + _poly_eval(_Y0_COEF, z)
    )


def _y1_small(x: np.ndarray) -> np.ndarray:
    z = 0.25 * x * x
    return (
        (2.0 / math.pi) * (np.log(0.5 * x) + EULER_GAMMA) * _j1_small(x)
        - 2.0 / (math.pi * x)
        - (x / (2.0 * math.pi)) * _poly_eval(_Y1_COEF, z)
    )


def _piecewise(x: np.ndarray, small, large) -> np.ndarray:
    out = np.empty_like(x)
    mask = x < _SMALL
    if mask.any():
        out[mask] = small(x[mask])
    if (~mask).any():
        out[~mask] = large(x[~mask])
    return out


def j0v(x: np.ndarray) -> np.ndarray:
    """J_0 on a nonnegative float array."""
    x = np.asarray(x, dtype=float)
    return _piecewise(x, _j0_small, lambda v: _jy_large(0, v)[0])


def j1v(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return _piecewise(x, _j1_small, lambda v: _jy_large(1, v)[0])


def y0v(x: np.ndarray) -> np.ndarray:
    """Y_0 on a strictly positive float array (log-singular at 0)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("Y_0 requires x > 0 (logarithmic singularity at 0)")
    return _piecewise(x, _y0_small, lambda v: _jy_large(0, v)[1])


def y1v(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("Y_1 requires x > 0")
    return _piecewise(x, _y1_small, lambda v: _jy_large(1, v)[1])


def hankel1_0v(x: np.ndarray) -> np.ndarray:
    """H_0^{(1)} = J_0 + i Y_0 on a strictly positive array."""
    return j0v(x) + 1j * y0v(x)


def green2d_array(kappa0: float, r: np.ndarray) -> np.ndarray:
    """(i/4) H_0^{(1)}(kappa0 r) on a strictly positive distance array."""
    if kappa0 <= 0.0:
        raise DomainError("wavenumber must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise SingularityError("green2d requires r > 0")
    return 0.25j * hankel1_0v(kappa0 * r)


def _check_order(n: int) -> int:
    if n != int(n) or n < 0:
        raise UnsupportedOrderError(f"order must be a nonnegative integer, got {n}")
    if n > ORDER_CAP:
        raise UnsupportedOrderError(f"order {n} above the cap {ORDER_CAP}")
    return int(n)


def _jn_series(n: int, x: float) -> float:
    """Power series for J_n, adequate for x < _SMALL at any order <= cap."""
    log_t0 = n * math.log(0.5 * x) - math.lgamma(n + 1.0)
    if log_t0 < -745.0:  # underflows to 0, which is correct to >1e-300
        return 0.0
    z = 0.25 * x * x
    term = math.exp(log_t0)
    total = term
    for k in range(1, _NSER + n):
        term *= -z / (k * (k + n))
        total += term
        if abs(term) < 1e-18 * (abs(total) + 1e-300):
            break
    return total


def _jn_miller(n: int, x: float) -> float:
    """Downward (Miller) recurrence, normalized by J_0 + 2 sum J_{2k} = 1."""
    top = int(max(n, x)) + int(math.sqrt(40.0 * max(n, x))) + 20
    jp = 0.0
    jc = 1e-30
    norm = 0.0
    result = 0.0
    for k in range(top, 0, -1):
        jm = (2.0 * k / x) * jc - jp
        jp = jc
        jc = jm
        if abs(jc) > 1e250:
            jc *= 1e-250
            jp *= 1e-250
            norm *= 1e-250
            result *= 1e-250
        if k - 1 == n:
            result = jc
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * jc
    norm += jc  # after the loop jc holds the unnormalized J_0
    return result / norm


def bessel_j(n: int, x: float) -> float:
    """J_n(x) for integer order 0 <= n <= 200 and x >= 0."""
    n = _check_order(n)
    if x < 0.0:
        raise DomainError("bessel_j requires x >= 0")
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if n == 0:
        return float(j0v(np.array([x]))[0])
    if n == 1:
        return float(j1v(np.array([x]))[0])
    if x < _SMALL:
        return _jn_series(n, x)
    if n < 0.7 * x:
        # upward recurrence is stable while the order stays below the argument
        jm = float(j0v(np.array([x]))[0])
        jc = float(j1v(np.array([x]))[0])
        for k in range(1, n):
            jm, jc = jc, (2.0 * k / x) * jc - jm
        return jc
    return _jn_miller(n, x)


def bessel_y(n: int, x: float) -> float:
    """Y_n(x) for integer order 0 <= n <= 200 and x > 0."""
    n = _check_order(n)
    if x <= 0.0:
        raise DomainError("bessel_y requires x > 0")
    ym = float(y0v(np.array([x]))[0])
    if n == 0:
        return ym
    yc = float(y1v(np.array([x]))[0])
    for k in range(1, n):
        ym, yc = yc, (2.0 * k / x) * yc - ym
        if not math.isfinite(yc):
            raise DomainError(f"Y_{n}({x}) overflows the double range")
    return yc


def hankel1(n: int, x: float) -> complex:
    """H_n^{(1)}(x) = J_n(x) + i Y_n(x) for n in {0, 1}."""
    if n not in (0, 1):
        raise UnsupportedOrderError("hankel1 supports orders 0 and 1 only")
    return complex(bessel_j(n, x), bessel_y(n, x))


def green2d(kappa0: float, r: float) -> complex:
    """2D Helmholtz fundamental solution (i/4) H_0^{(1)}(kappa0 r), r > 0."""
    if kappa0 <= 0.0:
        raise DomainError("wavenumber must be positive")
    if r <= 0.0:
        raise SingularityError("green2d requires r > 0; handle coincident points upstream")
    return 0.25j * hankel1(0, kappa0 * r)


def jn_table(nmax: int, x: np.ndarray) -> np.ndarray:
    """J_n(x) for all n = 0..nmax over an array, shape (nmax+1, len(x)).

    Vectorized Miller downward recurrence; x >= 0.
    """
    nmax = _check_order(nmax)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise DomainError("jn_table requires x >= 0")
    out = np.zeros((nmax + 1, x.size))
    pos = x > 0.0
    xp = x[pos]
    if xp.size:
        xm = float(xp.max())
        top = int(max(nmax, xm)) + int(math.sqrt(40.0 * max(nmax, xm))) + 20
        jp = np.zeros_like(xp)
        jc = np.full_like(xp, 1e-30)
        rows = np.zeros((nmax + 1, xp.size))
        norm = np.zeros_like(xp)
        for k in range(top, 0, -1):
            jm = (2.0 * k / xp) * jc - jp
            jp, jc = jc, jm
            big = np.abs(jc) > 1e250
            if big.any():
                jp[big] *= 1e-250
                jc[big] *= 1e-250
                norm[big] *= 1e-250
                rows[:, big] *= 1e-250
            if k - 1 <= nmax:
                rows[k - 1] = jc
            if (k - 1) % 2 == 0 and k - 1 > 0:
                norm += 2.0 * jc
        norm += jc
        out[:, pos] = rows / norm
    if (~pos).any():
        out[0, ~pos] = 1.0
    return out


def yn_table(nmax: int, x: np.ndarray) -> np.ndarray:
    """Y_n(x) for all n = 0..nmax over a strictly positive array."""
    nmax = _check_order(nmax)
    x = np.asarray(x, dtype=float)
    out = np.zeros((nmax + 1, x.size))
    out[0] = y0v(x)
    if nmax >= 1:
        out[1] = y1v(x)
    for k in range(1, nmax):
        out[k + 1] = (2.0 * k / x) * out[k] - out[k - 1]
    return out
