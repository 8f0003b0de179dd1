import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from raypath.core.ecdf import EmpiricalCdf
from raypath.core.mixture import (
    GaussianComponent,
    GaussianMixture,
    auto_segment,
    fit_cdf,
    fit_gmm,
    fit_report_csv,
    gmm_cdf,
    gmm_from_json,
    gmm_pdf,
    gmm_to_json,
    model_fit_error,
    segment_by_thresholds,
)
from raypath.shared.errors import FitError, FormatError, InfeasibleThresholdError, InvalidArgumentError, NoDataError

WEIGHTS = (0.2, 0.5, 0.3)
MEANS = (10.0, 12.0, 15.0)
SIGMAS = (0.05, 0.1, 0.08)


def four_cluster_cdf():
    sizes = (7, 12, 15, 16)
    samples = np.concatenate([np.linspace(10 + 2 * idx, 10.1 + 2 * idx, n) for idx, n in enumerate(sizes)])
    return EmpiricalCdf(samples, 50)


def mixture_samples(rng, n=10_000):
    """Multinomial cluster sizes with stratified normal draws inside each cluster."""
    counts = rng.multinomial(n, WEIGHTS)
    parts = []
    for count, mu, sigma in zip(counts, MEANS, SIGMAS):
        u = (np.arange(count) + 0.25 + 0.5 * rng.random(count)) / count
        parts.append(norm.ppf(u, loc=mu, scale=sigma))
    return np.concatenate(parts), counts


def test_segment_by_thresholds():
    clusters = segment_by_thresholds(four_cluster_cdf(), [0.14, 0.38, 0.68])
    assert [len(c) for c in clusters] == [7, 12, 15, 16]
    gmm = fit_gmm(clusters)
    assert gmm.weights.tolist() == [0.14, 0.24, 0.3, 0.32]
    assert np.all(np.diff(gmm.means) > 0)


def test_segments_concatenate_to_samples():
    cdf = four_cluster_cdf()
    assert np.array_equal(np.concatenate(segment_by_thresholds(cdf, [0.14, 0.38, 0.68])), cdf.samples)


@pytest.mark.parametrize("thresholds", [[0.5, 0.3], [0.3, 0.3], [0.0], [0.85]])
def test_infeasible_thresholds(thresholds):
    cdf = EmpiricalCdf(np.linspace(1, 2, 40), 50)
    with pytest.raises(InfeasibleThresholdError):
        segment_by_thresholds(cdf, thresholds)


def test_segment_needs_returns():
    with pytest.raises(NoDataError):
        segment_by_thresholds(EmpiricalCdf(np.empty(0), 5), [0.5])


def test_auto_segment_finds_gaps():
    cdf = four_cluster_cdf()
    assert auto_segment(cdf, 0.3) == [0.14, 0.38, 0.68]
    assert auto_segment(cdf, 5.0) == []
    with pytest.raises(InvalidArgumentError):
        auto_segment(cdf, 0.0)


def test_mixture_round_trip(rng):
    samples, counts = mixture_samples(rng)
    cdf = EmpiricalCdf(samples, samples.size)
    gmm, clusters = fit_cdf(cdf, min_gap=0.3)
    assert len(gmm) == 3
    assert [len(c) for c in clusters] == counts.tolist()
    assert math.fsum(gmm.weights) == pytest.approx(1.0, abs=1e-12)
    for component, alpha, mu, sigma, count in zip(gmm.clusters, WEIGHTS, MEANS, SIGMAS, counts):
        assert abs(component.alpha - alpha) <= 0.02
        assert abs(component.mu - mu) <= 3 * sigma / math.sqrt(count)
        assert component.sigma == pytest.approx(sigma, rel=0.05)
    assert model_fit_error(gmm, cdf) < 0.02


def test_mixture_cdf_integrates_density():
    gmm = GaussianMixture(tuple(GaussianComponent(a, m, s) for a, m, s in zip(WEIGHTS, MEANS, SIGMAS)))
    lower = min(MEANS) - 12 * max(SIGMAS)
    for x in np.linspace(9.5, 16.0, 100):
        breaks = [m for m in MEANS if lower < m < x]
        area, _ = integrate.quad(lambda t: gmm_pdf(gmm, t), lower, x, points=breaks or None, limit=200)
        assert abs(gmm_cdf(gmm, x) - gmm_cdf(gmm, lower) - area) <= 1e-6


def test_density_is_derivative_of_cdf():
    gmm = GaussianMixture(tuple(GaussianComponent(a, m, s) for a, m, s in zip(WEIGHTS, MEANS, SIGMAS)))
    h = 1e-5
    x = np.linspace(9.5, 16.0, 200)
    slope = (gmm_cdf(gmm, x + h) - gmm_cdf(gmm, x - h)) / (2 * h)
    assert np.allclose(slope, gmm_pdf(gmm, x), rtol=1e-5, atol=1e-6)


def test_fit_ignores_sample_order(rng):
    samples, _ = mixture_samples(rng, n=600)
    gmm, clusters = fit_cdf(EmpiricalCdf(samples, samples.size))
    for _ in range(3):
        shuffled = rng.permutation(samples)
        assert fit_cdf(EmpiricalCdf(shuffled, shuffled.size))[0] == gmm
        assert fit_gmm([rng.permutation(c) for c in clusters[::-1]]) == gmm


def test_fit_error_on_random_draws(rng):
    labels = rng.choice(3, size=10_000, p=WEIGHTS)
    samples = rng.normal(np.take(MEANS, labels), np.take(SIGMAS, labels))
    cdf = EmpiricalCdf(samples, samples.size)
    gmm, _ = fit_cdf(cdf)
    assert len(gmm) == 3
    assert model_fit_error(gmm, cdf) < 0.03


def test_pdf_and_cdf_accept_arrays():
    gmm = GaussianMixture((GaussianComponent(1.0, 0.0, 1.0),))
    assert gmm_cdf(gmm, 0.0) == pytest.approx(0.5)
    assert gmm_cdf(gmm, np.array([0.0, 0.0])).shape == (2,)
    assert gmm_pdf(gmm, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))


def test_sigma_floor():
    gmm = fit_gmm([[5.0, 5.0, 5.0], [9.0, 9.2]])
    assert gmm.clusters[0].sigma == 0.005
    assert gmm.clusters[1].sigma == pytest.approx(0.1)
    assert fit_gmm([[5.0]], sigma_floor=0.01).clusters[0].sigma == 0.01


def test_fit_errors():
    with pytest.raises(FitError):
        fit_gmm([[1.0], []])
    with pytest.raises(FitError):
        fit_gmm([[1.0, 3.0], [2.0]])
    with pytest.raises(FitError):
        fit_gmm([])


def test_mixture_invariants():
    with pytest.raises(InvalidArgumentError):
        GaussianMixture((GaussianComponent(0.5, 1.0, 0.1), GaussianComponent(0.4, 2.0, 0.1)))
    with pytest.raises(InvalidArgumentError):
        GaussianMixture((GaussianComponent(0.5, 2.0, 0.1), GaussianComponent(0.5, 1.0, 0.1)))
    with pytest.raises(InvalidArgumentError):
        GaussianMixture((GaussianComponent(1.0, 2.0, 0.0),))


def test_fit_error_scales_by_return_fraction():
    samples = np.repeat([10.0, 12.0], 20)
    full = EmpiricalCdf(samples, 40)
    partial = EmpiricalCdf(samples, 50)
    gmm = fit_cdf(full)[0]
    assert model_fit_error(gmm, full) == pytest.approx(0.25)
    assert fit_cdf(partial)[0] == gmm
    assert model_fit_error(gmm, partial) == pytest.approx(0.25 * 0.8)


def test_json_document():
    gmm = fit_gmm(segment_by_thresholds(four_cluster_cdf(), [0.14, 0.38, 0.68]))
    assert gmm_from_json(gmm_to_json(gmm)) == gmm
    for bad in ("{", '{"clusters": [{"alpha": 1.0}]}', '{"clusters": [{"alpha": 0.5, "mu": 1, "sigma": 1}]}'):
        with pytest.raises(FormatError):
            gmm_from_json(bad)


def test_fit_report():
    clusters = [np.array([1.0, 1.2]), np.array([5.0])]
    lines = fit_report_csv(fit_gmm(clusters), clusters).splitlines()
    assert lines[0] == "cluster,alpha,mu,sigma,count"
    assert lines[2].startswith("1,0.3333333333333333,5.0,0.005,")
    assert lines[2].endswith(",1")
