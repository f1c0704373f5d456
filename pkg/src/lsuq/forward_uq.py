"""Forward uncertainty propagation of the shape-parametrized scattering QoI.

The quantity of interest is the stacked real observation vector at the
exterior measurement points; its mean over the uniform parameter box is
estimated with equal-weight QMC rules and compared against a same-family
reference at a larger N.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import assembly, geometry, mesh, potential, qmc, solver
from .errors import LsuqError, SampleError
from .quadrature import TriangleQuadrature, triangle_quadrature

ENV_THREADS = "LSUQ_THREADS"


@dataclass(frozen=True)
class SolverContext:
    """Everything needed to evaluate the QoI at one parameter vector."""

    model: geometry.RadiusModel
    level: int
    setup: potential.ObservationSetup
    kappa0: float = 1.0
    quad_order: int = 2
    near_threshold: float = 0.05
    duffy_points: int | None = None
    direction: tuple[float, float] = (1.0, 0.0)
    kappa_frame: str = "material"
    solver_method: str = "direct"
    iter_tol: float = solver.RESIDUAL_TOL

    @cached_property
    def reference_mesh(self) -> mesh.TriangleMesh:
        return mesh.unit_disk_mesh(self.level)

    @cached_property
    def quad(self) -> TriangleQuadrature:
        return triangle_quadrature(self.quad_order)

    @cached_property
    def u_inc(self):
        return assembly.plane_wave(self.kappa0, self.direction)


def contrast(ctx: SolverContext, y: np.ndarray):
    """beta at physical points: material kappa field pulled back through r_y."""

    if ctx.kappa_frame not in ("material", "spatial"):
        raise ValueError(f"unknown kappa_frame {ctx.kappa_frame!r}")
    if ctx.kappa_frame == "spatial":
        def beta_at(x_phys: np.ndarray) -> np.ndarray:
            return (
                geometry.kappa_squared("spatial", x_phys=x_phys, kappa0=ctx.kappa0)
                - ctx.kappa0**2
            )
    else:
        def beta_at(x_phys: np.ndarray) -> np.ndarray:
            xhat = geometry.inverse_transform(ctx.model, y, x_phys)
            return (
                geometry.kappa_squared("material", xhat=xhat, kappa0=ctx.kappa0)
                - ctx.kappa0**2
            )

    return beta_at


def qoi(y: np.ndarray, ctx: SolverContext, beta_override=None) -> np.ndarray:
    """Full pipeline: validate -> pushforward -> assemble -> solve -> observe."""
    physical = mesh.pushforward(ctx.reference_mesh, ctx.model, y)
    space = assembly.P1Space(physical)
    beta_at = beta_override if beta_override is not None else contrast(ctx, y)
    system = assembly.assemble_system(
        space, ctx.kappa0, beta_at, ctx.u_inc, ctx.quad,
        ctx.near_threshold, ctx.duffy_points,
    )
    coeffs = solver.solve_ls(system, ctx.solver_method, ctx.iter_tol)
    sol = solver.DiscreteSolution(space=space, coefficients=coeffs)
    return potential.observe(sol, ctx.setup, beta_at, ctx.u_inc, ctx.quad)


def _indexed_qoi(args) -> np.ndarray:
    index, y, ctx = args
    try:
        return qoi(y, ctx)
    except LsuqError as exc:
        raise SampleError(index, exc) from exc


def evaluate_samples(ctx: SolverContext, ys: np.ndarray) -> np.ndarray:
    """QoI rows for every parameter vector, in input order.

    Worker count comes from the LSUQ_THREADS environment variable; results
    are gathered in sample order, so the reduction is order-independent of
    the scheduling.
    """
    jobs = [(i, ys[i], ctx) for i in range(ys.shape[0])]
    workers = max(1, int(os.environ.get(ENV_THREADS, "1")))
    if workers == 1:
        rows = [_indexed_qoi(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_indexed_qoi, jobs, chunksize=8))
    return np.asarray(rows)


def estimate(
    ctx: SolverContext,
    rule: qmc.QmcRule,
    use_tent: bool = False,
    integrand=None,
) -> np.ndarray:
    """Equal-weight QMC mean of the QoI; shift-averaged for shifted lattices.

    `integrand` maps a (N, s) parameter array to (N, 2K) rows and defaults to
    the full solver pipeline; tests substitute stubs here.
    """
    if integrand is None:
        integrand = lambda ys: evaluate_samples(ctx, ys)
    shifts = rule.shift_count if rule.kind == qmc.KIND_RLR else 1
    acc = np.zeros(2 * ctx.setup.count)
    for k in range(shifts):
        pts = qmc.generate(rule, k)
        if use_tent:
            pts = qmc.tent(pts)
        values = np.asarray(integrand(qmc.to_params(pts)))
        acc += values.mean(axis=0)
    return acc / shifts


@dataclass(frozen=True)
class RuleSpec:
    """Family description from which per-N rules are built."""

    kind: str
    alpha: int = 2
    shift_count: int = 4
    shift_seed: int = 0
    use_tent: bool = False

    def label(self) -> str:
        if self.kind == qmc.KIND_IPL:
            return f"{self.kind}_a{self.alpha}"
        if self.kind == qmc.KIND_RLR and self.use_tent:
            return f"{self.kind}_tent"
        return self.kind


def build_rule(spec: RuleSpec, n: int, ctx: SolverContext) -> qmc.QmcRule:
    s = ctx.model.dimension
    if spec.kind == qmc.KIND_RLR:
        weights = qmc.default_weights(ctx.model.theta, ctx.model.zeta, s)
        z = qmc.cbc_lattice(n, s, weights)
        return qmc.QmcRule(spec.kind, n, s, generating_vector=z,
                           shift_seed=spec.shift_seed, shift_count=spec.shift_count)
    if spec.kind == qmc.KIND_IPL:
        return qmc.embedded_ipl_rule(n, s, spec.alpha)
    return qmc.QmcRule(qmc.KIND_MC, n, s, shift_seed=spec.shift_seed,
                       shift_count=spec.shift_count)


@dataclass(frozen=True)
class ForwardStudy:
    ctx: SolverContext
    specs: tuple[RuleSpec, ...]
    n_values: tuple[int, ...]
    n_ref: int
    error_norm: str = "max"  # or "l2"

    def __post_init__(self):
        ns = self.n_values
        if any(b <= a for a, b in zip(ns, ns[1:])) or ns[-1] >= self.n_ref:
            raise ValueError("N values must increase strictly and stay below N_ref")
        if self.error_norm not in ("max", "l2"):
            raise ValueError("error_norm must be 'max' or 'l2'")


def _error(norm: str, diff: np.ndarray) -> float:
    return float(np.abs(diff).max() if norm == "max" else np.linalg.norm(diff))


def convergence_report(study: ForwardStudy, include_timing: bool = True):
    """Rows (rule, N, shift_count, error, seconds) plus per-rule fitted slopes.

    The error is measured against the same rule family at N_ref; the slope is
    a least-squares fit on log2 N vs log2 error.
    """
    rows = []
    slopes = {}
    for spec in study.specs:
        ref = estimate(study.ctx, build_rule(spec, study.n_ref, study.ctx), spec.use_tent)
        errs = []
        for n in study.n_values:
            start = time.perf_counter()
            q = estimate(study.ctx, build_rule(spec, n, study.ctx), spec.use_tent)
            seconds = time.perf_counter() - start if include_timing else 0.0
            err = _error(study.error_norm, q - ref)
            errs.append(err)
            shifts = spec.shift_count if spec.kind == qmc.KIND_RLR else 1
            rows.append({
                "rule": spec.label(),
                "N": n,
                "shift_count": shifts,
                "error": err,
                "seconds": seconds,
            })
        slopes[spec.label()] = float(
            np.polyfit(np.log2(study.n_values), np.log2(errs), 1)[0]
        )
    return rows, slopes


def write_csv(rows, path) -> None:
    """Fixed-format study CSV (stable across runs for identical inputs)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rule", "N", "shift_count", "error", "seconds"])
        for row in rows:
            writer.writerow([
                row["rule"], row["N"], row["shift_count"],
                f"{row['error']:.12e}", f"{row['seconds']:.3f}",
            ])
