import numpy as np
import pytest
from numpy.testing import assert_allclose

from geomedian import (
    SolverConfig,
    bootstrap_mean,
    bootstrap_spatial_median,
    conditional_variance,
    quantile,
    spatial_median,
    validate_sample,
    write_stats_csv,
)
from geomedian.bootstrap import BootstrapDraws
from geomedian.errors import InvalidLevel, TooFewDraws
from geomedian.estimator import _data_scale, _weiszfeld_batch
from geomedian.streams import NS_BOOT_MEAN, rademacher, substream

from _oracles import all_sign_patterns, ks_distance


def _draws(stats, n_obs=4, target="mean", seed=0):
    stats = np.asarray(stats, dtype=np.float64)
    return BootstrapDraws(stats=stats, B=stats.size, seed=seed, target=target, n_obs=n_obs)


def test_identical_observations_give_zero_stats():
    sample = validate_sample([[2.0, -1.0]] * 6)
    fit = spatial_median(sample)
    draws = bootstrap_spatial_median(sample, fit, 50, seed=1)
    assert_allclose(draws.stats, 0.0)


def test_mirror_pair_two_point_law_by_enumeration():
    # residuals r and -r: sign patterns (+,+)/(-,-) leave a symmetric pair
    # with midpoint 0; (+,-)/(-,+) stack both points at +-r, so the
    # re-solved center is +-r itself
    r = np.array([0.7, -0.3])
    residuals = np.stack([r, -r])
    signs = all_sign_patterns(2)
    beta, _, _, _ = _weiszfeld_batch(
        residuals, signs, SolverConfig(), _data_scale(residuals), init=np.zeros((4, 2))
    )
    stats = np.sqrt(2.0) * np.abs(beta).max(axis=1)
    assert_allclose(np.sort(stats), [0.0, 0.0, np.sqrt(2) * 0.7, np.sqrt(2) * 0.7], atol=1e-12)

    sample = validate_sample(np.stack([r, -r]))
    fit = spatial_median(sample)
    assert_allclose(fit.theta_hat, 0.0, atol=1e-15)
    draws = bootstrap_spatial_median(sample, fit, 4000, seed=9)
    freq = (draws.stats > 0.5).mean()
    assert abs(freq - 0.5) <= 3.0 * np.sqrt(0.25 / 4000)


def test_spatial_median_bootstrap_matches_enumeration_small_case():
    rng = np.random.default_rng(21)
    sample = validate_sample(rng.standard_normal((6, 2)))
    fit = spatial_median(sample)
    residuals = sample.values - fit.theta_hat
    signs = all_sign_patterns(6)
    beta, _, _, _ = _weiszfeld_batch(
        residuals, signs, SolverConfig(), _data_scale(residuals), init=np.zeros((64, 2))
    )
    exact = np.sqrt(6.0) * np.abs(beta).max(axis=1)
    draws = bootstrap_spatial_median(sample, fit, 4000, seed=33)
    assert ks_distance(draws.stats, exact) < 0.05


def test_mean_bootstrap_constant_sample_is_zero():
    sample = validate_sample([[3.0, 3.0]] * 5)
    draws = bootstrap_mean(sample, 64, seed=2)
    assert_allclose(draws.stats, 0.0)


def test_mean_bootstrap_mirror_pair_closed_form():
    r = np.array([0.4, -1.2])
    center = np.array([5.0, 7.0])
    sample = validate_sample(np.stack([center + r, center - r]))
    draws = bootstrap_mean(sample, 4000, seed=3)
    hi = np.sqrt(2.0) * np.abs(r).max()
    values = np.unique(np.round(draws.stats, 12))
    assert set(values) <= {0.0, round(hi, 12)}
    freq = (draws.stats > hi / 2).mean()
    assert abs(freq - 0.5) <= 3.0 * np.sqrt(0.25 / 4000)


def test_mean_bootstrap_matches_enumeration():
    rng = np.random.default_rng(4)
    sample = validate_sample(rng.standard_normal((10, 3)))
    centered = sample.values - sample.values.mean(axis=0)
    signs = all_sign_patterns(10)
    exact = np.sqrt(10.0) * np.abs(signs @ centered / 10.0).max(axis=1)
    draws = bootstrap_mean(sample, 10000, seed=5)
    assert ks_distance(draws.stats, exact) < 0.03


def test_quantile_order_statistic_convention():
    assert quantile(_draws([1.0, 2.0, 3.0, 4.0]), 0.5) == 2.0
    assert quantile(_draws([5.0]), 0.3) == 5.0
    assert quantile(_draws(np.arange(1.0, 101.0)), 0.95) == 95.0


def test_quantile_rejects_bad_level():
    with pytest.raises(InvalidLevel):
        quantile(_draws([1.0, 2.0]), 0.0)
    with pytest.raises(InvalidLevel):
        quantile(_draws([1.0, 2.0]), 1.0)


def test_conditional_variance_examples():
    assert conditional_variance(_draws([3.0, 3.0, 3.0])) == 0.0
    root_n = np.sqrt(4.0)
    assert_allclose(conditional_variance(_draws([0.0, 2.0 * root_n], n_obs=4)), 2.0)
    with pytest.raises(TooFewDraws):
        conditional_variance(_draws([1.0]))


def test_determinism_across_runs_and_workers():
    rng = np.random.default_rng(6)
    sample = validate_sample(rng.standard_normal((12, 3)))
    fit = spatial_median(sample)
    a = bootstrap_spatial_median(sample, fit, 600, seed=7, workers=1)
    b = bootstrap_spatial_median(sample, fit, 600, seed=7, workers=3)
    assert np.array_equal(a.stats, b.stats)
    c = bootstrap_mean(sample, 600, seed=7, workers=1)
    d = bootstrap_mean(sample, 600, seed=7, workers=4)
    assert np.array_equal(c.stats, d.stats)


def test_translation_leaves_stats_bitwise_unchanged():
    # exact-dyadic data: the fitted centers and hence the residual matrices
    # agree bit-for-bit before and after the shift
    base = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    shift = np.array([0.25, -0.5])
    s0 = validate_sample(base)
    s1 = validate_sample(base + shift)
    f0 = spatial_median(s0)
    f1 = spatial_median(s1)
    assert np.array_equal(s0.values - f0.theta_hat, s1.values - f1.theta_hat)
    a = bootstrap_spatial_median(s0, f0, 200, seed=8)
    b = bootstrap_spatial_median(s1, f1, 200, seed=8)
    assert np.array_equal(a.stats, b.stats)


def test_sign_flip_closure():
    rng = np.random.default_rng(9)
    half = rng.standard_normal((5, 2))
    data = np.vstack([half, -half])
    sample = validate_sample(data)
    fit = spatial_median(sample)
    assert np.abs(fit.theta_hat).max() < 1e-14
    flipped = validate_sample(-data)
    fit_flipped = spatial_median(flipped)
    a = bootstrap_spatial_median(sample, fit, 300, seed=10)
    b = bootstrap_spatial_median(flipped, fit_flipped, 300, seed=10)
    assert np.array_equal(a.stats, b.stats)

    # matched substreams: flipping residuals and multipliers together leaves
    # every multiplied point, hence every statistic, bitwise unchanged
    residuals = sample.values - fit.theta_hat
    signs = np.stack([rademacher(substream(11, NS_BOOT_MEAN, b_), 10) for b_ in range(8)])
    cfg = SolverConfig()
    beta_a, _, _, _ = _weiszfeld_batch(residuals, signs, cfg, _data_scale(residuals), init=np.zeros((8, 2)))
    beta_b, _, _, _ = _weiszfeld_batch(-residuals, -signs, cfg, _data_scale(residuals), init=np.zeros((8, 2)))
    assert np.array_equal(beta_a, beta_b)


def test_stats_csv_round_trip(tmp_path):
    draws = _draws([0.5, 1.5, 2.5])
    path = tmp_path / "stats.csv"
    write_stats_csv(draws, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "stat"
    assert [float(v) for v in lines[1:]] == [0.5, 1.5, 2.5]


def test_draws_are_immutable():
    sample = validate_sample(np.random.default_rng(1).standard_normal((6, 2)))
    draws = bootstrap_mean(sample, 32, seed=1)
    with pytest.raises(ValueError):
        draws.stats[0] = -1.0


def test_keep_vectors_returns_full_replicate_centers():
    rng = np.random.default_rng(12)
    sample = validate_sample(rng.standard_normal((10, 3)))
    fit = spatial_median(sample)
    draws = bootstrap_spatial_median(sample, fit, 40, seed=2, keep_vectors=True)
    assert draws.vectors.shape == (40, 3)
    assert_allclose(np.sqrt(10) * np.abs(draws.vectors).max(axis=1), draws.stats)
    lean = bootstrap_spatial_median(sample, fit, 40, seed=2)
    assert lean.vectors is None
    assert np.array_equal(lean.stats, draws.stats)
    mean_draws = bootstrap_mean(sample, 40, seed=2, keep_vectors=True)
    assert mean_draws.vectors.shape == (40, 3)
