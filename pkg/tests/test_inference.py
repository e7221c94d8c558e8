import json

import numpy as np
import pytest

from rae.inference import (
    EstimateReport,
    GridSpec,
    OutcomeDataset,
    PosteriorGrid,
    bayes_update,
    bayes_update_counts,
    mle_estimate,
    posterior,
    resample,
    standard_sampling_estimate,
    tally,
    trial_statistics,
)
from rae.likelihood import prob_plus

SMALL = GridSpec(pi_points=201, lambda_points=51)


def synthetic(pi, lam, shots_by_layer, rng):
    return OutcomeDataset(
        {l: np.where(rng.random(n) < prob_plus(pi, lam, l), 1, -1) for l, n in shots_by_layer.items()}
    )


def test_single_minus_outcome_favours_minus_one():
    g = bayes_update(PosteriorGrid.uniform(SMALL), -1, 0)
    assert g.mode() == (-1.0, 0.0)
    pi, lam = np.meshgrid(SMALL.pi_axis, SMALL.lambda_axis)
    expected = 0.5 * (1 - np.exp(-lam / 2) * pi)
    np.testing.assert_allclose(g.probabilities(), expected / expected.sum(), rtol=1e-10)


def test_opposite_outcomes_peak_at_zero():
    spec = GridSpec.fixed_lambda(0.0, pi_points=201)
    g = bayes_update(bayes_update(PosteriorGrid.uniform(spec), 1, 0), -1, 0)
    expected = (1 - spec.pi_axis**2) / 4
    np.testing.assert_allclose(g.probabilities()[0], expected / expected.sum(), atol=1e-12)
    assert g.mode() == (0.0, 0.0)


def brute_force_argmax(counts, pi_axis, lam_axis):
    """Direct log-likelihood sum on an arbitrary grid, without the library tables."""
    best, arg = -np.inf, None
    for lam in lam_axis:
        ll = np.zeros_like(pi_axis)
        for l, (n_plus, n_minus) in counts.items():
            s = np.exp(-(l + 0.5) * lam) * np.cos((2 * l + 1) * np.arccos(pi_axis))
            with np.errstate(divide="ignore"):
                ll += n_plus * np.log((1 + s) / 2) + n_minus * np.log((1 - s) / 2)
        i = int(np.argmax(ll))
        if ll[i] > best:
            best, arg = ll[i], (pi_axis[i], lam)
    return arg


def test_argmax_matches_finer_brute_force_grid():
    rng = np.random.default_rng(5)
    data = synthetic(-0.2238, 0.08, {1: 250, 5: 250, 6: 250, 7: 250}, rng)
    coarse = GridSpec(pi_points=401, lambda_points=101)
    pi_hat, lam_hat = posterior(data, coarse).mode()
    fine_pi, fine_lam = brute_force_argmax(data.counts(), np.linspace(-1, 1, 1601), np.linspace(0, 0.5, 401))
    assert abs(pi_hat - fine_pi) <= 2 * coarse.pi_step
    assert abs(lam_hat - fine_lam) <= 2 * 0.5 / (coarse.lambda_points - 1)


def test_processing_order_does_not_matter():
    rng = np.random.default_rng(8)
    labels = rng.integers(0, 4, 300)
    outcomes = np.where(rng.random(300) < 0.4, 1, -1)
    g1 = PosteriorGrid.uniform(SMALL)
    for l, o in zip(labels, outcomes):
        g1 = bayes_update(g1, int(o), int(l))
    perm = rng.permutation(300)
    g2 = PosteriorGrid.uniform(SMALL)
    for l, o in zip(labels[perm], outcomes[perm]):
        g2 = bayes_update(g2, int(o), int(l))
    g3 = bayes_update_counts(PosteriorGrid.uniform(SMALL), tally(labels, outcomes))
    assert g1.argmax() == g2.argmax() == g3.argmax()
    np.testing.assert_allclose(g1.normalized().log_weights, g3.normalized().log_weights, atol=1e-9)


def test_log_domain_survives_many_updates():
    spec = GridSpec(pi_points=21, lambda_points=11)
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 3, 100_000)
    outcomes = np.where(rng.random(100_000) < 0.45, 1, -1)
    g = PosteriorGrid.uniform(spec)
    for start in range(0, 100_000, 1000):
        g = bayes_update_counts(g, tally(labels[start : start + 1000], outcomes[start : start + 1000]))
        assert np.max(g.log_weights) == 0.0
        assert not np.any(np.isnan(g.log_weights))
    assert abs(g.probabilities().sum() - 1) <= 1e-9
    g1 = PosteriorGrid.uniform(spec)
    for l, o in zip(labels[:20_000], outcomes[:20_000]):
        g1 = bayes_update(g1, int(o), int(l))
    assert np.all(np.isfinite(g1.log_weights) | (g1.log_weights == -np.inf))


def test_tie_breaking_prefers_small_lambda_then_small_pi():
    g = PosteriorGrid(SMALL, np.zeros((SMALL.lambda_points, SMALL.pi_points)))
    assert g.argmax() == (0, 0)
    lw = np.full((SMALL.lambda_points, SMALL.pi_points), -1.0)
    lw[3, 50] = lw[3, 20] = lw[7, 10] = 0.0
    assert PosteriorGrid(SMALL, lw).argmax() == (3, 20)


def test_bayes_update_rejects_bad_outcome():
    with pytest.raises(ValueError):
        bayes_update(PosteriorGrid.uniform(SMALL), 0, 1)


def test_mle_all_plus_at_layer_zero():
    data = OutcomeDataset({0: [1] * 50})
    assert mle_estimate(data, 50, SMALL, 0) == (1.0, 0.0)


def test_mle_is_sample_mean_for_single_layer():
    spec = GridSpec.fixed_lambda(0.0)
    rng = np.random.default_rng(4)
    data = OutcomeDataset({0: np.where(rng.random(5000) < 0.35, 1, -1)})
    labels, outcomes = resample(data, data.total, np.random.default_rng(11))
    pi_hat, _ = mle_estimate(data, data.total, spec, np.random.default_rng(11))
    # Bernoulli MLE of the resampled outcomes is their mean.
    assert abs(pi_hat - np.clip(outcomes.mean(), -1, 1)) <= spec.pi_step


def test_mle_noiseless_recovers_truth_statistically():
    truth = -0.2238
    spec = GridSpec.fixed_lambda(0.0)
    layers = {0: 8192, 1: 8192, 2: 8192, 3: 8192}
    estimates = []
    for seed in range(32):
        data = synthetic(truth, 0.0, layers, np.random.default_rng([seed, 1]))
        estimates.append(mle_estimate(data, 10_000, spec, np.random.default_rng([seed, 2]))[0])
    err = np.array(estimates) - truth
    assert np.max(np.abs(err)) <= 0.01
    # Resampling M from N adds the pool's variance to the draw's.
    info = np.mean([(2 * l + 1) ** 2 for l in layers]) / (1 - truth**2)
    predicted = np.sqrt((1 / 10_000 + 1 / sum(layers.values())) / info)
    assert abs(err.mean()) <= 4 * predicted / np.sqrt(32) + spec.pi_step
    assert 0.5 * predicted <= err.std() <= 2 * predicted


def test_posterior_consistency_with_growing_samples():
    truth_pi, truth_lam = -0.224, 0.08  # both on the default grid
    spec = GridSpec()
    layers = (0, 1, 2, 3, 4, 5)
    medians = []
    for m in (1_000, 10_000, 100_000):
        errs = []
        for seed in range(32):
            data = synthetic(truth_pi, truth_lam, {l: m // len(layers) + 1 for l in layers}, np.random.default_rng([seed, m]))
            errs.append(abs(mle_estimate(data, m, spec, np.random.default_rng([seed, m, 1]))[0] - truth_pi))
        medians.append(np.median(errs))
    assert medians[0] > medians[1] > medians[2]
    assert medians[2] <= 2 * spec.pi_step


def test_mle_errors():
    data = OutcomeDataset({0: [1, -1]})
    with pytest.raises(ValueError):
        mle_estimate(data, 3, SMALL, 0)
    with pytest.raises(ValueError):
        mle_estimate(OutcomeDataset({}), 1, SMALL, 0)
    with pytest.raises(ValueError):
        OutcomeDataset({0: [1, 0]})


def test_stratified_resample_keeps_layer_shares():
    data = OutcomeDataset({0: [1] * 300, 3: [-1] * 100})
    labels, outcomes = resample(data, 101, np.random.default_rng(0), stratified=True)
    assert np.sum(labels == 0) == 76 and np.sum(labels == 3) == 25
    assert np.all(outcomes[labels == 0] == 1) and np.all(outcomes[labels == 3] == -1)


def test_trial_statistics_examples():
    s = trial_statistics([0.3, 0.3, 0.3], 0.3)
    assert (s.bias, s.sigma, s.rmse) == (0.0, 0.0, 0.0)
    s = trial_statistics([0.4, 0.2], 0.3)
    assert s.bias == pytest.approx(0.0, abs=1e-15)
    assert s.rmse == pytest.approx(0.1)
    with pytest.raises(ValueError):
        trial_statistics([0.1], 0.0)


def test_trial_statistics_identity_and_error_bar():
    rng = np.random.default_rng(1)
    est = -0.22 + 0.01 * rng.normal(size=32) + 0.003
    s = trial_statistics(est, -0.2238)
    assert abs(s.rmse**2 - (s.bias**2 + s.sigma**2)) <= 1e-9
    sq = (est + 0.2238) ** 2
    assert s.rmse_se == pytest.approx(np.sqrt(np.std(sq)) / np.sqrt(32), rel=1e-12)


def test_standard_sampling_estimate():
    assert standard_sampling_estimate([1, -1]) == 0.0
    assert standard_sampling_estimate([-1, -1, -1, 1]) == -0.5
    with pytest.raises(ValueError):
        standard_sampling_estimate([])


def test_standard_sampling_sees_decayed_mean():
    decayed = np.exp(-0.04) * -0.2238
    assert decayed == pytest.approx(-0.2150, abs=1e-4)
    rng = np.random.default_rng(21)
    est = [standard_sampling_estimate(np.where(rng.random(12875) < (1 + decayed) / 2, 1, -1)) for _ in range(64)]
    sd = np.sqrt((1 - decayed**2) / 12875)
    assert abs(np.mean(est) - decayed) <= 4 * sd / 8
    assert np.mean(est) - (-0.2238) > 0.004


def test_report_json_fields():
    report = EstimateReport.from_trials("rae", "XX", [1, 5], 1000, -0.2238, [(-0.22, 0.08), (-0.23, 0.07)], 7)
    doc = json.loads(report.to_json())
    for key in ("method", "observable", "layers", "shots", "pi_hat", "lambda_hat", "rmse", "rmse_se",
                "bias", "bias_se", "sigma", "sigma_se", "n_trials", "seed"):
        assert key in doc
    assert doc["n_trials"] == 2 and doc["lambda_hat"] == pytest.approx(0.075)
