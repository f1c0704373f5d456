"""QMC point generators on [0,1)^s and their map to the parameter box [-1,1]^s.

Three rules: a seeded Monte-Carlo baseline, randomly-shifted rank-1 lattices
(with a component-by-component construction of the generating vector), and
digit-interlaced base-2 polynomial lattices whose generating matrices are
loaded from data files (shipped under qmc_data/, built once offline by
tools/make_ipl_asset.py).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import GeneratingDataError

KIND_MC = "monte_carlo"
KIND_RLR = "shifted_lattice"
KIND_IPL = "interlaced_poly_lattice"


@dataclass(frozen=True)
class QmcRule:
    kind: str
    n_points: int
    dimension: int
    generating_vector: np.ndarray | None = None  # rank-1 lattice
    generating_matrices: np.ndarray | None = None  # (s_base, m, m) bits
    alpha: int = 1
    shift_seed: int = 0
    shift_count: int = 1

    def __post_init__(self):
        if self.kind not in (KIND_MC, KIND_RLR, KIND_IPL):
            raise GeneratingDataError(f"unknown rule kind {self.kind!r}")
        if self.n_points < 1 or self.dimension < 1:
            raise GeneratingDataError("n_points and dimension must be positive")
        if self.kind == KIND_RLR:
            z = self.generating_vector
            if z is None or z.shape != (self.dimension,):
                raise GeneratingDataError("lattice rule needs a generating vector of length s")
        if self.kind == KIND_IPL:
            if self.n_points & (self.n_points - 1):
                raise GeneratingDataError("polynomial lattices need n a power of 2")
            if self.alpha not in (2, 3):
                raise GeneratingDataError("interlacing factor must be 2 or 3")
            c = self.generating_matrices
            if c is None or c.shape[0] < self.alpha * self.dimension:
                raise GeneratingDataError(
                    "need alpha*s generating matrices for the interlaced rule"
                )


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray  # (n, s) in [0, 1)

    def __post_init__(self):
        p = self.points
        if p.ndim != 2 or np.any(p < 0.0) or np.any(p >= 1.0):
            raise GeneratingDataError("points must lie in [0,1)^s")


def generate(rule: QmcRule, shift_index: int = 0) -> PointSet:
    """The shift_index-th realization of the rule's point set."""
    if shift_index < 0 or (rule.kind == KIND_RLR and shift_index >= rule.shift_count):
        raise GeneratingDataError("shift index out of range")
    if rule.kind == KIND_MC:
        rng = np.random.Generator(
            np.random.Philox(key=[rule.shift_seed, shift_index])
        )
        pts = rng.random((rule.n_points, rule.dimension))
    elif rule.kind == KIND_RLR:
        i = np.arange(rule.n_points)[:, None]
        base = (i * rule.generating_vector[None, :] % rule.n_points) / rule.n_points
        rng = np.random.Generator(np.random.Philox(key=[rule.shift_seed, 0]))
        deltas = rng.random((rule.shift_count, rule.dimension))
        pts = (base + deltas[shift_index]) % 1.0
    else:
        if shift_index != 0:
            raise GeneratingDataError("interlaced rule is deterministic (shift 0 only)")
        pts = _interlaced_points(rule)
    return PointSet(points=pts)


def to_params(points: PointSet) -> np.ndarray:
    """Map [0,1)^s to the parameter box via y = 2t - 1."""
    return 2.0 * points.points - 1.0


def tent(points: PointSet) -> PointSet:
    """Baker's (tent) transform 1 - |2t - 1|, periodizing smooth integrands."""
    folded = 1.0 - np.abs(2.0 * points.points - 1.0)
    return PointSet(points=np.minimum(folded, np.nextafter(1.0, 0.0)))


def _digit_matrix(n: int, m: int) -> np.ndarray:
    """(n, m) bits of 0..n-1, least significant first."""
    i = np.arange(n)[:, None]
    return (i >> np.arange(m)[None, :]) & 1


def _interlaced_points(rule: QmcRule) -> np.ndarray:
    m = int(rule.n_points).bit_length() - 1
    c = rule.generating_matrices
    if c.shape[1] < m:
        raise GeneratingDataError(
            f"generating matrices support n up to 2^{c.shape[1]}, got 2^{m}"
        )
    a = _digit_matrix(rule.n_points, m)
    out = np.zeros((rule.n_points, rule.dimension))
    alpha = rule.alpha
    for j in range(rule.dimension):
        for cpt in range(alpha):
            mat = c[j * alpha + cpt][:m, :m]
            digits = (a @ mat.T) % 2  # (n, m), digit l of the base coordinate
            weights = 2.0 ** -(np.arange(m) * alpha + cpt + 1.0)
            out[:, j] += digits @ weights
    return out


def default_weights(theta: float, zeta: float, s: int) -> np.ndarray:
    """Product weights matching the radius-expansion coefficient bounds."""
    j = np.arange(1, s + 1)
    half = np.ceil(j / 2.0)
    return theta * (1.0 + half) * half**-zeta


def _b2(x: np.ndarray) -> np.ndarray:
    return x * x - x + 1.0 / 6.0


def cbc_lattice(n: int, s: int, weights) -> np.ndarray:
    """Component-by-component generating vector for a shifted lattice.

    Greedy minimization of the shift-averaged worst-case error with product
    weights, e^2(z) = -1 + (1/n) sum_k prod_j (1 + gamma_j B2({k z_j / n})).
    Ties break to the smallest candidate.
    """
    gamma = np.asarray(weights, dtype=float)
    if gamma.shape != (s,) or np.any(gamma <= 0.0):
        raise GeneratingDataError("need s positive weights")
    if s > 200:
        raise GeneratingDataError("dimension above the supported cap 200")
    is_pow2 = n >= 2 and (n & (n - 1)) == 0
    if not is_pow2 and any(n % p == 0 for p in range(2, int(math.isqrt(n)) + 1)):
        raise GeneratingDataError("n must be prime or a power of 2")
    if is_pow2:
        candidates = np.arange(1, n, 2)
    else:
        candidates = np.arange(1, n)
    table = _b2(np.arange(n) / n)
    prod = np.ones(n)
    z = np.empty(s, dtype=int)
    k = np.arange(n)
    for j in range(s):
        idx = np.outer(k, candidates) % n
        scores = (prod[:, None] * (1.0 + gamma[j] * table[idx])).mean(axis=0)
        best = int(np.argmin(scores))
        z[j] = int(candidates[best])
        prod = prod * (1.0 + gamma[j] * table[(k * z[j]) % n])
    return z


def lattice_worst_case_error(n: int, z: np.ndarray, weights) -> float:
    """Squared shift-averaged worst-case error of a rank-1 lattice."""
    gamma = np.asarray(weights, dtype=float)
    k = np.arange(n)
    prod = np.ones(n)
    for j in range(z.size):
        prod *= 1.0 + gamma[j] * _b2(((k * int(z[j])) % n) / n)
    return float(prod.mean() - 1.0)


# --- generating-data files ----------------------------------------------------


def load_generating_data(path) -> dict:
    """Parse a `lattice` or `polylattice` generating-data file."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    if not lines:
        raise GeneratingDataError(f"{path}:1: empty file")
    head = lines[0].split()
    if head[0] == "lattice":
        if len(head) != 3:
            raise GeneratingDataError(f"{path}:1: expected 'lattice n s'")
        n, s = int(head[1]), int(head[2])
        if len(lines) < 1 + s:
            raise GeneratingDataError(f"{path}:{len(lines)}: expected {s} integers")
        try:
            z = np.array([int(lines[1 + j]) for j in range(s)])
        except ValueError as exc:
            raise GeneratingDataError(f"{path}: bad integer: {exc}") from exc
        return {"kind": KIND_RLR, "n": n, "s": s, "generating_vector": z}
    if head[0] == "polylattice":
        if len(head) != 4:
            raise GeneratingDataError(f"{path}:1: expected 'polylattice n s alpha'")
        n, s, alpha = int(head[1]), int(head[2]), int(head[3])
        m = n.bit_length() - 1
        if n != 1 << m:
            raise GeneratingDataError(f"{path}:1: n must be a power of 2")
        if len(lines) < 1 + s * m:
            raise GeneratingDataError(
                f"{path}:{len(lines)}: expected {s * m} bit rows"
            )
        mats = np.zeros((s, m, m), dtype=np.int8)
        for j in range(s):
            for r in range(m):
                ln = lines[1 + j * m + r]
                if len(ln) != m or set(ln) - {"0", "1"}:
                    raise GeneratingDataError(
                        f"{path}:{2 + j * m + r}: expected {m} binary digits"
                    )
                mats[j, r] = [int(ch) for ch in ln]
        return {"kind": KIND_IPL, "n": n, "s": s, "alpha": alpha,
                "generating_matrices": mats}
    raise GeneratingDataError(f"{path}:1: unknown header {head[0]!r}")


def write_generating_data(path, data: dict) -> None:
    """Inverse of load_generating_data."""
    with open(path, "w") as fh:
        if data["kind"] == KIND_RLR:
            fh.write(f"lattice {data['n']} {data['s']}\n")
            for v in data["generating_vector"]:
                fh.write(f"{int(v)}\n")
        elif data["kind"] == KIND_IPL:
            mats = data["generating_matrices"]
            s, m, _ = mats.shape
            fh.write(f"polylattice {data['n']} {s} {data['alpha']}\n")
            for j in range(s):
                for r in range(m):
                    fh.write("".join(str(int(b)) for b in mats[j, r]) + "\n")
        else:
            raise GeneratingDataError(f"cannot write rule kind {data['kind']!r}")


def embedded_ipl_rule(n_points: int, dimension: int, alpha: int) -> QmcRule:
    """Interlaced rule backed by the shipped generating-matrix asset."""
    n_points = int(n_points)
    m = n_points.bit_length() - 1
    if n_points != 1 << m:
        raise GeneratingDataError("n must be a power of 2")
    name = f"ipl_m{m}_a{alpha}.txt"
    ref = resources.files("lsuq.qmc_data").joinpath(name)
    if not ref.is_file():
        raise GeneratingDataError(f"no embedded generating data {name}")
    with resources.as_file(ref) as path:
        data = load_generating_data(path)
    if data["s"] < alpha * dimension:
        raise GeneratingDataError(
            f"embedded asset {name} supports at most {data['s'] // alpha} dimensions"
        )
    return QmcRule(
        kind=KIND_IPL,
        n_points=n_points,
        dimension=dimension,
        generating_matrices=data["generating_matrices"],
        alpha=alpha,
    )
