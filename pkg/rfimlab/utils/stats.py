"""
Estimators used by the experiment summaries.

Every function consumes values in record order and sums with ``math.fsum``,
so a summary depends only on the records, never on how they were produced.
"""

import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from rfimlab.config import config
from rfimlab.models import DecayFit, Estimate, ExponentEstimate

logger = logging.getLogger(__name__)

QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


def wald(successes: int, n: int, z: float = config.confidence_z) -> Estimate:
    """Binomial proportion with a continuity-corrected Wald interval."""
    if n <= 0:
        return Estimate(value=None, n=0)
    p = successes / n
    se = math.sqrt(p * (1.0 - p) / n)
    half = z * se + 0.5 / n
    return Estimate(value=p, stderr=se, low=max(0.0, p - half), high=min(1.0, p + half), n=n)


def mean(values: Sequence[float], z: float = config.confidence_z) -> Estimate:
    n = len(values)
    if n == 0:
        return Estimate(value=None, n=0)
    mu = math.fsum(values) / n
    if n == 1:
        return Estimate(value=mu, n=1)
    var = math.fsum((v - mu) ** 2 for v in values) / (n - 1)
    se = math.sqrt(var / n)
    return Estimate(value=mu, stderr=se, low=mu - z * se, high=mu + z * se, n=n)


def within(a: Estimate, b: Estimate, sigmas: float = 3.0) -> bool:
    """Two independent estimates agree within ``sigmas`` combined standard errors."""
    if a.value is None or b.value is None:
        return False
    combined = math.hypot(a.stderr or 0.0, b.stderr or 0.0)
    return abs(a.value - b.value) <= sigmas * combined


def correlation(x: Sequence[float], y: Sequence[float]) -> Tuple[Optional[float], Optional[float]]:
    """Pearson correlation and its null standard error ``1/sqrt(n)``."""
    n = len(x)
    if n < 3:
        return None, None
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if xa.std() == 0 or ya.std() == 0:
        return 0.0, 1.0 / math.sqrt(n)
    return float(np.corrcoef(xa, ya)[0, 1]), 1.0 / math.sqrt(n)


def fit_decay(
    counts: Mapping[int, Tuple[int, int]],
    z: float = config.confidence_z,
    min_positive: int = 5,
) -> DecayFit:
    """
    Fit ``log m_N = b - c N`` by weighted least squares.

    ``counts`` maps N to ``(zero-label count, samples)``. Only N with at least
    ``min_positive`` hits enter the fit; the weight of each point is the
    inverse delta-method standard error of ``log m_N``.
    """
    ns = sorted(counts)
    estimates = {n: wald(k, total, z) for n, (k, total) in ((n, counts[n]) for n in ns)}
    values = [estimates[n].value for n in ns]
    decreasing = len(ns) > 1 and all(
        a is not None and b is not None and b < a for a, b in zip(values, values[1:])
    )
    included = [n for n in ns if counts[n][0] >= min_positive]
    dropped = [n for n in ns if n not in included]
    if dropped:
        logger.warning("decay fit excludes N=%s (fewer than %d zero labels)", dropped, min_positive)
    fit = DecayFit(estimates=estimates, included=included, strictly_decreasing=decreasing)
    if len(included) < 2:
        return fit

    x = np.array(included, dtype=float)
    k = np.array([counts[n][0] for n in included], dtype=float)
    total = np.array([counts[n][1] for n in included], dtype=float)
    p = np.minimum(k / total, 1.0 - 0.5 / total)
    y = np.log(p)
    w = np.sqrt(total * p / (1.0 - p))
    coef, cov = np.polyfit(x, y, 1, w=w, cov="unscaled")
    slope, intercept = float(coef[0]), float(coef[1])
    se = math.sqrt(float(cov[0, 0]))
    fit.rate = Estimate(value=-slope, stderr=se, low=-slope - z * se, high=-slope + z * se, n=len(x))
    fit.intercept = intercept
    fit.residuals = {n: float(r) for n, r in zip(included, y - (slope * x + intercept))}

    positive = [n for n in included if n > 0]
    if len(positive) >= 2:
        lx = np.log(np.array(positive, dtype=float))
        idx = [included.index(n) for n in positive]
        pcoef, pcov = np.polyfit(lx, y[idx], 1, w=w[idx], cov="unscaled")
        pse = math.sqrt(float(pcov[0, 0]))
        power = -float(pcoef[0])
        fit.power = Estimate(value=power, stderr=pse, low=power - z * pse, high=power + z * pse, n=len(lx))
    return fit


def _slope(log_n: np.ndarray, log_y: np.ndarray) -> float:
    return float(np.polyfit(log_n, log_y, 1)[0])


def estimate_exponent(
    distances: Mapping[int, Sequence[Optional[float]]],
    grid: Sequence[float],
    seed: int,
    resamples: int = config.bootstrap_resamples,
) -> ExponentEstimate:
    """
    Geodesic length exponent from per-N distance samples (``None`` = no crossing).

    The point estimate is the slope of log median against log N over N with
    finite samples; the interval is a percentile bootstrap over samples.
    """
    result = ExponentEstimate()
    finite: Dict[int, np.ndarray] = {}
    for n in sorted(distances):
        ds = distances[n]
        vals = np.array([d for d in ds if d is not None], dtype=float)
        result.sample_sizes[n] = int(vals.size)
        result.infinite_counts[n] = len(ds) - int(vals.size)
        result.tail_probabilities[n] = {
            f"{a:g}": (float((vals <= n**a).sum()) / len(ds)) if len(ds) else 0.0 for a in grid
        }
        if vals.size == 0:
            result.excluded.append(n)
            logger.warning("geodesic N=%d has no finite crossing; excluded from the exponent fit", n)
            continue
        finite[n] = vals
        result.quantiles[n] = {f"{q:g}": float(np.quantile(vals, q)) for q in QUANTILES}

    ns = sorted(finite)
    if len(ns) < 2:
        return result
    log_n = np.log(np.array(ns, dtype=float))
    medians = np.array([np.median(finite[n]) for n in ns])
    result.alpha_hat = _slope(log_n, np.log(medians))

    rng = np.random.default_rng(seed)
    boot: List[float] = []
    for _ in range(resamples):
        meds = np.array([np.median(rng.choice(finite[n], size=finite[n].size)) for n in ns])
        boot.append(_slope(log_n, np.log(meds)))
    low, high = np.quantile(np.array(boot), [0.025, 0.975])
    result.confidence_low = min(float(low), result.alpha_hat)
    result.confidence_high = max(float(high), result.alpha_hat)
    return result
