import numpy as np
import pytest

from lsuq import bayes
from lsuq import forward_uq as fuq
from lsuq import geometry as geo
from lsuq import potential as pot
from lsuq import qmc
from lsuq.errors import ConfigError, DegeneratePosteriorError


def small_ctx(modes=2, level=1, theta=0.25, zeta=3.0):
    model = geo.RadiusModel(theta=theta, zeta=zeta, modes=modes)
    return fuq.SolverContext(
        model=model, level=level, setup=pot.ObservationSetup.ring(1.0),
        duffy_points=2,
    )


def mc_rule(n, s, seed=5):
    return qmc.QmcRule(qmc.KIND_MC, n, s, shift_seed=seed)


def test_potential_examples():
    data = np.zeros(4)
    g = np.array([0.2, 0.0, 0.0, 0.0])
    assert bayes.potential(data, data, 0.1) == 0.0
    assert bayes.potential(data, g, 0.1) == pytest.approx(2.0)
    assert bayes.potential(data, g, 0.05) == pytest.approx(8.0)
    with pytest.raises(ConfigError):
        bayes.potential(data, g, 0.0)
    with pytest.raises(ConfigError):
        bayes.potential(data, g[:-1], 0.1)


def test_default_ground_truth_box():
    y = bayes.default_ground_truth(10)
    assert np.all(np.abs(y) <= 0.5)
    np.testing.assert_allclose(y[:6], [-0.4, 0.4, -0.4, 0.4, -0.4, 0.4])
    assert np.all(y[6:] == 0.0)


def test_synth_data_noise_free_and_seeded():
    ctx = small_ctx()
    ystar = bayes.default_ground_truth(4)
    clean = bayes.synth_data(ystar, 1e-30, 1, ctx)
    np.testing.assert_allclose(clean.data, fuq.qoi(ystar, ctx), atol=1e-25)
    a = bayes.synth_data(ystar, 0.1, 99, ctx)
    b = bayes.synth_data(ystar, 0.1, 99, ctx)
    np.testing.assert_array_equal(a.data, b.data)
    c = bayes.synth_data(ystar, 0.1, 100, ctx)
    assert not np.array_equal(a.data, c.data)


def test_noise_generator_statistics():
    draws = np.array([bayes.gaussian_noise(seed, 20) for seed in range(10_000)])
    stds = draws.std(axis=0)
    np.testing.assert_allclose(stds, 1.0, rtol=0.03)
    np.testing.assert_allclose(draws.mean(axis=0), 0.0, atol=0.05)


def test_ground_truth_box_enforced():
    with pytest.raises(ConfigError):
        bayes.BayesSetup(
            ground_truth=np.array([0.7, 0.0]), sigma=0.1, noise_seed=0,
            data=np.zeros(4),
        )


def test_constant_weights_reduce_to_prior():
    ctx = small_ctx()
    setup = bayes.synth_data(bayes.default_ground_truth(4), 0.1, 3, ctx)
    rule = mc_rule(64, 4)
    res = bayes.posterior_boundary(setup, ctx, rule, potentials=[np.zeros(64)])
    np.testing.assert_allclose(res.posterior_mean, res.prior_mean, atol=1e-14)
    assert res.evidence == pytest.approx(1.0)


def test_ratio_estimator_shift_invariance():
    ctx = small_ctx()
    setup = bayes.synth_data(bayes.default_ground_truth(4), 0.1, 3, ctx)
    rule = mc_rule(64, 4)
    rng = np.random.default_rng(2)
    phis = rng.uniform(0.0, 50.0, 64)
    a = bayes.posterior_boundary(setup, ctx, rule, potentials=[phis])
    b = bayes.posterior_boundary(setup, ctx, rule, potentials=[phis + 123.456])
    np.testing.assert_allclose(a.posterior_mean, b.posterior_mean, atol=1e-12)


def test_evidence_in_unit_interval_for_nonnegative_misfit():
    ctx = small_ctx()
    setup = bayes.synth_data(bayes.default_ground_truth(4), 0.1, 3, ctx)
    rule = mc_rule(32, 4)
    phis = np.abs(np.random.default_rng(1).normal(size=32))
    phis -= phis.min()  # unnormalized path: min already zero
    res = bayes.posterior_boundary(setup, ctx, rule, potentials=[phis])
    assert 0.0 < res.evidence <= 1.0


def test_degenerate_posterior_detected():
    ctx = small_ctx()
    setup = bayes.synth_data(bayes.default_ground_truth(4), 0.1, 3, ctx)
    rule = mc_rule(16, 4)
    with pytest.raises(DegeneratePosteriorError):
        bayes.posterior_boundary(setup, ctx, rule, potentials=[np.full(16, np.inf)])


def test_prior_mean_matches_exact_prior_expectation():
    # E[rho_y(phi)] = 1 because every term is odd in some coordinate
    ctx = small_ctx(modes=5)
    setup = bayes.synth_data(bayes.default_ground_truth(10), 0.1, 3, ctx)
    rule = mc_rule(512, 10, seed=17)
    res = bayes.posterior_boundary(setup, ctx, rule, potentials=[np.zeros(512)])
    ys = qmc.to_params(qmc.generate(rule))
    bnd = np.array([geo.radius(ctx.model, y, res.angles) for y in ys])
    se = bnd.std(axis=0, ddof=1) / np.sqrt(512)
    assert np.all(np.abs(res.prior_mean - 1.0) <= 3.0 * se + 1e-12)


def test_flat_likelihood_at_large_sigma():
    ctx = small_ctx()
    ystar = bayes.default_ground_truth(4)
    clean = fuq.qoi(ystar, ctx)
    setup = bayes.BayesSetup(ground_truth=ystar, sigma=10.0, noise_seed=0, data=clean)
    rule = mc_rule(64, 4)
    res = bayes.posterior_boundary(setup, ctx, rule)
    ys = qmc.to_params(qmc.generate(rule))
    bnd = np.array([geo.radius(ctx.model, y, res.angles) for y in ys])
    se = bnd.std(axis=0, ddof=1) / np.sqrt(64)
    assert np.all(np.abs(res.posterior_mean - res.prior_mean) <= 2.0 * se + 1e-12)


def test_posterior_closer_than_prior_small_setup():
    ctx = small_ctx(modes=4)
    ystar = bayes.default_ground_truth(8)
    setup = bayes.synth_data(ystar, 0.1, 11, ctx)
    rule = mc_rule(128, 8, seed=23)
    res = bayes.posterior_boundary(setup, ctx, rule)
    truth = geo.radius(ctx.model, ystar, res.angles)
    post = np.linalg.norm(res.posterior_mean - truth)
    prior = np.linalg.norm(res.prior_mean - truth)
    assert post < prior


def test_inversion_convergence_table():
    ctx = small_ctx()
    setup = bayes.synth_data(bayes.default_ground_truth(4), 0.2, 4, ctx)
    spec = fuq.RuleSpec(kind=qmc.KIND_RLR, shift_count=2, shift_seed=9, use_tent=True)
    rows, slope = bayes.inversion_convergence(setup, ctx, spec, (8, 16, 32), 128)
    assert [r["N"] for r in rows] == [8, 16, 32]
    assert all(np.isfinite(r["error"]) and r["error"] >= 0.0 for r in rows)
    assert np.isfinite(slope)


def test_boundary_csv_rows():
    ctx = small_ctx()
    setup = bayes.synth_data(bayes.default_ground_truth(4), 0.1, 3, ctx)
    rule = mc_rule(16, 4)
    res = bayes.posterior_boundary(setup, ctx, rule, potentials=[np.zeros(16)])
    rows = list(bayes.boundary_csv_rows(setup, ctx, res))
    assert len(rows) == 256
    assert set(rows[0]) == {"angle", "prior_mean", "posterior_mean", "truth"}
