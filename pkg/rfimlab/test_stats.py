import math

import pytest

from rfimlab.models import Estimate
from rfimlab.utils.stats import correlation, estimate_exponent, fit_decay, mean, wald, within


def test_wald():
    est = wald(50, 100)
    assert est.value == 0.5
    assert est.stderr == pytest.approx(0.05)
    assert est.low < 0.5 < est.high
    assert wald(0, 0).value is None
    assert wald(0, 10).low == 0.0


def test_mean():
    est = mean([1.0, 2.0, 3.0])
    assert est.value == 2.0
    assert est.stderr == pytest.approx(math.sqrt(1.0 / 3.0))
    assert mean([]).value is None
    one = mean([5.0])
    assert one.value == 5.0 and one.stderr is None


def test_within():
    a = Estimate(value=1.0, stderr=0.1)
    assert within(a, Estimate(value=1.2, stderr=0.1))
    assert not within(a, Estimate(value=2.0, stderr=0.1))
    assert not within(a, Estimate(value=None))


def test_fit_decay_recovers_the_rate():
    counts = {1: (607, 1000), 2: (368, 1000), 3: (223, 1000), 4: (135, 1000)}
    fit = fit_decay(counts)
    assert fit.rate.value == pytest.approx(0.5, abs=0.02)
    assert fit.intercept == pytest.approx(0.0, abs=0.05)
    assert fit.strictly_decreasing
    assert fit.included == [1, 2, 3, 4]
    assert fit.power is not None
    assert set(fit.residuals) == {1, 2, 3, 4}


def test_fit_decay_drops_sparse_points():
    counts = {0: (900, 1000), 2: (400, 1000), 4: (3, 1000)}
    fit = fit_decay(counts)
    assert fit.included == [0, 2]
    assert fit.rate is not None
    sparse = fit_decay({4: (3, 1000)})
    assert sparse.rate is None


def test_estimate_exponent_from_exact_medians():
    distances = {
        n: [0.9 * n**1.2, n**1.2, 1.1 * n**1.2, None] for n in (16, 32, 64)
    }
    distances[128] = [None, None]
    est = estimate_exponent(distances, grid=[1.0, 1.5], seed=1, resamples=50)
    assert est.alpha_hat == pytest.approx(1.2)
    assert est.confidence_low <= est.alpha_hat <= est.confidence_high
    assert est.excluded == [128]
    assert est.infinite_counts[16] == 1
    assert est.sample_sizes[32] == 3
    assert est.tail_probabilities[16]["1.5"] == 0.75
    assert est.tail_probabilities[16]["1"] == 0.0
    assert est.quantiles[64]["0.5"] == pytest.approx(64**1.2)


def test_estimate_exponent_needs_two_sizes():
    est = estimate_exponent({16: [20.0, 30.0]}, grid=[1.0], seed=0, resamples=10)
    assert est.alpha_hat is None


def test_correlation():
    r, se = correlation([1, 2, 3, 4], [2, 4, 6, 8])
    assert r == pytest.approx(1.0) and se == 0.5
    assert correlation([1, 2, 3, 4], [1, 1, 1, 1]) == (0.0, 0.5)
    assert correlation([1, 2], [1, 2]) == (None, None)
