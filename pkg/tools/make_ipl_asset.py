"""Build the embedded generating-matrix assets for interlaced polynomial lattices.

Run from the repository root:  python3 tools/make_ipl_asset.py

For every base-2 size n = 2^m (m = 4..12) and interlacing factor alpha in
{2, 3} this constructs a base-2 polynomial lattice over GF(2)[x] with an
irreducible modulus p of degree m and Korobov-style generating polynomials
q_j = g^{j-1} mod p.  The multiplier g is selected empirically: among a
candidate set, pick the g whose digit-interlaced rule gives the smallest
quadrature error on the separable test integrand
f(y) = prod_{j<=20} (1 + j^{-3} y_j), whose exact integral over [-1,1]^20 is 1.
The winning g per (m, alpha) is printed and the resulting matrices written to
src/lsuq/qmc_data/ipl_m{m}_a{alpha}.txt in the plain generating-data format.

The assets in qmc_data/ were produced by exactly this script; rerunning it
reproduces them bit for bit.
"""

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from lsuq import qmc  # noqa: E402

S_BASE = 300  # supports rules up to s = 100 at alpha = 3
TEST_DIM = 20

# one irreducible polynomial per degree (bitmask, leading term included)
IRREDUCIBLE = {
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
}


def gf2_mulmod(a: int, b: int, p: int, m: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= p
    return out


def laurent_coefficients(q: int, p: int, m: int, count: int) -> list[int]:
    """u_1..u_count with q(x)/p(x) = sum_l u_l x^{-l} over GF(2)."""
    t = q
    out = []
    for _ in range(count):
        t <<= 1
        u = (t >> m) & 1
        if u:
            t ^= p
        out.append(u)
    return out


def generating_matrices(g: int, m: int, s: int) -> np.ndarray:
    p = IRREDUCIBLE[m]
    mats = np.zeros((s, m, m), dtype=np.int8)
    q = 1
    for j in range(s):
        u = laurent_coefficients(q, p, m, 2 * m - 1)
        for r in range(m):
            mats[j, r] = u[r : r + m]
        q = gf2_mulmod(q, g, p, m)
    return mats


def rule_error(mats: np.ndarray, m: int, alpha: int) -> float:
    rule = qmc.QmcRule(
        kind=qmc.KIND_IPL,
        n_points=1 << m,
        dimension=TEST_DIM,
        generating_matrices=mats,
        alpha=alpha,
    )
    y = qmc.to_params(qmc.generate(rule))
    b = np.arange(1, TEST_DIM + 1.0) ** -3.0
    return abs(np.prod(1.0 + b[None, :] * y, axis=1).mean() - 1.0)


def main() -> None:
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "src" / "lsuq" / "qmc_data"
    out_dir.mkdir(exist_ok=True)
    for m in sorted(IRREDUCIBLE):
        candidates = [g for g in range(2, 1 << m)]
        if len(candidates) > 200:
            # deterministic thinning keeps the search affordable
            step = len(candidates) / 200.0
            candidates = [candidates[int(k * step)] for k in range(200)]
        for alpha in (2, 3):
            best = None
            for g in candidates:
                mats = generating_matrices(g, m, alpha * TEST_DIM)
                err = rule_error(mats, m, alpha)
                if best is None or err < best[1]:
                    best = (g, err)
            g, err = best
            mats = generating_matrices(g, m, S_BASE)
            path = out_dir / f"ipl_m{m}_a{alpha}.txt"
            qmc.write_generating_data(
                path,
                {
                    "kind": qmc.KIND_IPL,
                    "n": 1 << m,
                    "alpha": alpha,
                    "generating_matrices": mats,
                },
            )
            print(f"m={m} alpha={alpha}: g={g} test error {err:.3e} -> {path.name}")


if __name__ == "__main__":
    main()
