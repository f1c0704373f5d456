"""Command-line entry point: configuration loading, run orchestration, CSV I/O.

Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure.
All file writing happens here, on a single process, so worker counts never
affect the bytes on disk.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import (
    assembly,
    bayes,
    config,
    forward_uq,
    geometry,
    mesh,
    oracle,
    potential,
    qmc,
    solver,
)
from .errors import ConfigError, LsuqError, SampleError


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _echo(cfg: config.RunConfig) -> None:
    os.makedirs(cfg.output_dir, exist_ok=True)
    config.echo_config(cfg, os.path.join(cfg.output_dir, f"{cfg.label}_config_echo.cfg"))


def _parse_y(text: str, dimension: int) -> np.ndarray:
    if not text:
        return np.zeros(dimension)
    vals = [float(tok) for tok in text.split(",")]
    if len(vals) > dimension:
        raise ConfigError(f"--y has {len(vals)} entries, dimension is {dimension}")
    y = np.zeros(dimension)
    y[: len(vals)] = vals
    return y


# ---------------------------------------------------------------- selftest


def _selftest_checks():
    from . import special_functions as sf

    def bessel_wronskian():
        x = np.linspace(0.1, 12.0, 200)
        w = sf.j1v(x) * sf.y0v(x) - sf.j0v(x) * sf.y1v(x)
        assert np.abs(w - 2.0 / (np.pi * x)).max() < 1e-9

    def geometry_roundtrip():
        model = geometry.RadiusModel(theta=0.25, zeta=3.0, modes=4)
        rng = np.random.default_rng(0)
        y = rng.uniform(-1.0, 1.0, 8)
        xhat = rng.uniform(-0.6, 0.6, (50, 2))
        x = geometry.transform(model, y, xhat)
        back = geometry.inverse_transform(model, y, x)
        assert np.abs(back - xhat).max() < 1e-12

    def mesh_area():
        m = mesh.unit_disk_mesh(3)
        assert abs(m.signed_areas().sum() - np.pi) < 0.02

    def mass_exactness():
        space = assembly.P1Space(mesh.unit_disk_mesh(2))
        mass = assembly.mass_matrix(space)
        ones = np.ones(space.dof_count)
        assert abs(ones @ mass @ ones - space.mesh.signed_areas().sum()) < 1e-12

    def solver_roundtrip():
        rng = np.random.default_rng(1)
        mat = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
        mat += 40 * np.eye(40)
        x0 = rng.normal(size=40) + 1j * rng.normal(size=40)
        sys_ = assembly.ComplexLinearSystem(matrix=mat, rhs=mat @ x0)
        assert np.abs(solver.solve_ls(sys_) - x0).max() < 1e-10

    def mie_continuity():
        sol = oracle.mie_solve(oracle.DiskScatterer(1.0, 2.0, 1.0))
        th = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
        inner = np.column_stack([np.cos(th), np.sin(th)]) * (1 - 1e-13)
        outer = np.column_stack([np.cos(th), np.sin(th)]) * (1 + 1e-13)
        gap = np.abs(oracle.mie_eval(sol, inner) - oracle.mie_eval(sol, outer))
        assert gap.max() < 1e-9

    def lattice_points():
        z = qmc.cbc_lattice(16, 4, qmc.default_weights(0.25, 3.0, 4))
        pts = qmc.generate(
            qmc.QmcRule(qmc.KIND_RLR, 16, 4, generating_vector=z, shift_seed=0)
        )
        assert pts.points.shape == (16, 4)
        assert pts.points.min() >= 0.0 and pts.points.max() < 1.0

    def ipl_asset():
        rule = qmc.embedded_ipl_rule(64, 8, 2)
        pts = qmc.generate(rule)
        assert pts.points.shape == (64, 8)

    def qoi_finite():
        model = geometry.RadiusModel(theta=0.25, zeta=3.0, modes=2)
        ctx = forward_uq.SolverContext(
            model=model, level=1, setup=potential.ObservationSetup.ring(1.0),
            duffy_points=2,
        )
        v = forward_uq.qoi(np.zeros(4), ctx)
        assert v.shape == (20,) and np.all(np.isfinite(v))

    def noise_moments():
        draws = bayes.gaussian_noise(7, 20000)
        assert abs(draws.mean()) < 0.05 and abs(draws.std() - 1.0) < 0.05

    return [
        bessel_wronskian, geometry_roundtrip, mesh_area, mass_exactness,
        solver_roundtrip, mie_continuity, lattice_points, ipl_asset,
        qoi_finite, noise_moments,
    ]


def _cmd_selftest(args) -> int:
    passed = failed = 0
    for check in _selftest_checks():
        try:
            check()
        except Exception as exc:  # report and continue: count all failures
            failed += 1
            print(f"FAIL {check.__name__}: {exc}")
        else:
            passed += 1
            print(f"PASS {check.__name__}")
    print(f"{passed} passed, {failed} failed")
    return 0 if failed == 0 else 2


# ---------------------------------------------------------------- commands


def _cmd_mesh_info(args) -> int:
    m = mesh.unit_disk_mesh(args.level)
    print(f"level        {args.level}")
    print(f"vertices     {m.vertices.shape[0]}")
    print(f"triangles    {m.triangle_count}")
    print(f"mesh size h  {mesh.mesh_size(m):.6f}")
    print(f"total area   {m.signed_areas().sum():.6f}")
    return 0


def _cmd_solve(args) -> int:
    cfg = config.load_config(args.config)
    _echo(cfg)
    ctx = config.solver_context(cfg)
    y = _parse_y(args.y, ctx.model.dimension)
    physical = mesh.pushforward(ctx.reference_mesh, ctx.model, y)
    space = assembly.P1Space(physical)
    beta_at = forward_uq.contrast(ctx, y)
    system = assembly.assemble_system(
        space, ctx.kappa0, beta_at, ctx.u_inc, ctx.quad,
        ctx.near_threshold, ctx.duffy_points,
    )
    coeffs = solver.solve_ls(system, ctx.solver_method, ctx.iter_tol)
    sol = solver.DiscreteSolution(space=space, coefficients=coeffs)
    obs = potential.observe(sol, ctx.setup, beta_at, ctx.u_inc, ctx.quad)

    base = os.path.join(cfg.output_dir, args.out)
    _write_rows(
        base + "_solution.csv",
        ["x", "y", "re", "im"],
        (
            [f"{v[0]:.12e}", f"{v[1]:.12e}", f"{c.real:.12e}", f"{c.imag:.12e}"]
            for v, c in zip(physical.vertices, coeffs)
        ),
    )
    _write_rows(
        base + "_observation.csv",
        ["index", "re", "im"],
        (
            [k, f"{obs[2 * k]:.12e}", f"{obs[2 * k + 1]:.12e}"]
            for k in range(ctx.setup.count)
        ),
    )
    print(f"wrote {base}_solution.csv and {base}_observation.csv")
    return 0


def _cmd_forward(args) -> int:
    cfg = config.load_config(args.config)
    _echo(cfg)
    ctx = config.solver_context(cfg)
    study = forward_uq.ForwardStudy(
        ctx, config.rule_specs(cfg), cfg.N_list, cfg.N_ref, cfg.error_norm
    )
    rows, slopes = forward_uq.convergence_report(study, include_timing=cfg.timing)
    forward_uq.write_csv(rows, os.path.join(cfg.output_dir, args.out))
    for label, slope in slopes.items():
        print(f"{label}: fitted slope {slope:.3f}")
    return 0


def _cmd_invert(args) -> int:
    cfg = config.load_config(args.config)
    _echo(cfg)
    ctx = config.solver_context(cfg)
    ystar = config.ground_truth(cfg)
    setup = bayes.synth_data(ystar, cfg.sigma, cfg.noise_seed, ctx)
    specs = config.rule_specs(cfg)
    spec = specs[0] if specs else forward_uq.RuleSpec(kind=qmc.KIND_RLR, use_tent=True)
    rule = forward_uq.build_rule(spec, cfg.N, ctx)
    result = bayes.posterior_boundary(setup, ctx, rule, cfg.angles, spec.use_tent)
    _write_rows(
        os.path.join(cfg.output_dir, args.out),
        ["angle", "prior_mean", "posterior_mean", "truth"],
        (
            [f"{r['angle']:.12e}", f"{r['prior_mean']:.12e}",
             f"{r['posterior_mean']:.12e}", f"{r['truth']:.12e}"]
            for r in bayes.boundary_csv_rows(setup, ctx, result)
        ),
    )
    print(f"evidence estimate {result.evidence:.6e}")
    return 0


def _cmd_oracle_compare(args) -> int:
    rows = []
    for level in range(1, args.level + 1):
        r = oracle.compare_to_galerkin(
            level, kappa_in=args.kin, duffy_points=args.duffy_points or None
        )
        rows.append([f"{r['h']:.12e}", f"{r['l2_error']:.12e}", f"{r['h1_error']:.12e}"])
        print(f"level {level}: h={r['h']:.4f} L2={r['l2_error']:.3e} H1={r['h1_error']:.3e}")
    _write_rows(args.out, ["h", "L2_error", "H1_error"], rows)
    return 0


def _cmd_qmc_gen(args) -> int:
    if args.rule == "lattice":
        if args.gen:
            data = qmc.load_generating_data(args.gen)
            rule = qmc.QmcRule(
                qmc.KIND_RLR, data["n"], data["s"],
                generating_vector=data["generating_vector"],
                shift_seed=args.seed,
            )
        else:
            z = qmc.cbc_lattice(args.n, args.s, qmc.default_weights(0.25, 3.0, args.s))
            rule = qmc.QmcRule(
                qmc.KIND_RLR, args.n, args.s, generating_vector=z,
                shift_seed=args.seed,
            )
    elif args.rule == "polylattice":
        rule = qmc.embedded_ipl_rule(args.n, args.s, args.alpha)
    elif args.rule == "mc":
        rule = qmc.QmcRule(qmc.KIND_MC, args.n, args.s, shift_seed=args.seed)
    else:
        raise ConfigError(f"unknown rule {args.rule!r}")
    pts = qmc.generate(rule).points
    _write_rows(
        args.out,
        [f"t{j}" for j in range(pts.shape[1])],
        ([f"{v:.17g}" for v in row] for row in pts),
    )
    print(f"wrote {pts.shape[0]} x {pts.shape[1]} points to {args.out}")
    return 0


# ---------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lsuq",
        description="Acoustic-scattering UQ: forward QMC studies and shape inversion.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("selftest", help="run the fast invariant suite")

    p = sub.add_parser("mesh-info", help="print disk mesh statistics")
    p.add_argument("--level", type=int, required=True)

    p = sub.add_parser("solve", help="single forward solve at a parameter vector")
    p.add_argument("--config", required=True)
    p.add_argument("--y", default="", help="comma-separated parameters (default 0)")
    p.add_argument("--out", default="solve", help="output file prefix")

    p = sub.add_parser("forward", help="forward UQ convergence study")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="forward.csv")

    p = sub.add_parser("invert", help="Bayesian shape inversion")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="posterior.csv")

    p = sub.add_parser("oracle-compare", help="Galerkin vs analytic disk series")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--kin", type=float, default=2.0, help="interior wavenumber")
    p.add_argument("--duffy-points", type=int, default=0)
    p.add_argument("--out", default="err.csv")

    p = sub.add_parser("qmc-gen", help="write a QMC point set to CSV")
    p.add_argument("--rule", choices=("lattice", "polylattice", "mc"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gen", default="", help="optional generating-data file")
    p.add_argument("--out", default="points.csv")

    return parser


_HANDLERS = {
    "selftest": _cmd_selftest,
    "mesh-info": _cmd_mesh_info,
    "solve": _cmd_solve,
    "forward": _cmd_forward,
    "invert": _cmd_invert,
    "oracle-compare": _cmd_oracle_compare,
    "qmc-gen": _cmd_qmc_gen,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SampleError as exc:
        print(f"numerical failure at sample {exc.index}: {exc.cause}", file=sys.stderr)
        return 2
    except LsuqError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
