"""
Discrete power-law sampling and fitting.

The fitter estimates the exponent by maximum likelihood for a chosen lower
cutoff, picks the cutoff that minimises the Kolmogorov-Smirnov distance and
attaches a goodness-of-fit p-value from a semi-parametric bootstrap.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

logger = logging.getLogger(__name__)

DEFAULT_REPLICATES = 100
DEFAULT_MIN_TAIL = 20
DEFAULT_REJECTION_THRESHOLD = 0.001

_EXPONENT_BOUNDS = (1.0001, 10.0)
# past this many support points the exact table gets too large
_EXACT_SUPPORT_LIMIT = 2_000_000
_APPROX_CEILING = 1e12


class PowerLawFitError(ValueError):
    """Raised when a sample cannot support a power-law fit."""


@dataclass
class PowerLawFit:
    exponent: float
    x_min: int
    ks_distance: float
    p_value: Optional[float]
    sample_count: int
    tail_count: int
    replicates: int

    def rejected(self, threshold: float = DEFAULT_REJECTION_THRESHOLD) -> bool:
        """True when the bootstrap rules the power law out."""
        return self.p_value is not None and self.p_value < threshold

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class DiscretePowerLaw:
    """Truncated discrete power law on [x_min, x_max] with a cached CDF table."""

    def __init__(self, exponent: float, x_min: int, x_max: int):
        if x_min < 1:
            raise ValueError(f"x_min must be >= 1, got {x_min}")
        if x_max < x_min:
            raise ValueError(f"Empty support [{x_min}, {x_max}]")
        self.exponent = float(exponent)
        self.x_min = int(x_min)
        self.x_max = int(x_max)
        support = np.arange(self.x_min, self.x_max + 1, dtype=np.float64)
        weights = support ** (-self.exponent)
        self._cdf = np.cumsum(weights)
        self._cdf /= self._cdf[-1]
        self.mean = float(np.dot(support, weights) / weights.sum())

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.searchsorted(self._cdf, rng.random(size), side="right")
        return (np.minimum(idx, len(self._cdf) - 1) + self.x_min).astype(np.int64)

    def draw_one(self, rng: np.random.Generator) -> int:
        idx = int(np.searchsorted(self._cdf, rng.random(), side="right"))
        return min(idx, len(self._cdf) - 1) + self.x_min


def sample_discrete_power_law(
    exponent: float,
    x_min: int,
    x_max: Optional[int],
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw integers with P(x) proportional to x^-exponent on [x_min, x_max].

    A finite support is sampled exactly by inverting the cumulative
    distribution. With `x_max=None` (unbounded tail) the rounded continuous
    approximation is used.
    """
    if size <= 0:
        return np.zeros(0, dtype=np.int64)
    if x_min < 1:
        raise ValueError(f"x_min must be >= 1, got {x_min}")

    if x_max is not None and x_max - x_min + 1 <= _EXACT_SUPPORT_LIMIT:
        return DiscretePowerLaw(exponent, x_min, x_max).draw(rng, size)

    u = rng.random(size)
    draws = (x_min - 0.5) * (1.0 - u) ** (-1.0 / (exponent - 1.0)) + 0.5
    draws = np.floor(np.minimum(draws, _APPROX_CEILING)).astype(np.int64)
    if x_max is not None:
        draws = np.minimum(draws, x_max)
    return draws


def discrete_power_law_mean(exponent: float, x_min: int, x_max: int) -> float:
    """Mean of the truncated discrete power law on [x_min, x_max]."""
    return DiscretePowerLaw(exponent, x_min, x_max).mean


def _fit_exponent(log_sum: float, tail_count: int, x_min: int) -> float:
    def negative_log_likelihood(alpha: float) -> float:
        return alpha * log_sum + tail_count * np.log(zeta(alpha, x_min))

    result = minimize_scalar(
        negative_log_likelihood, bounds=_EXPONENT_BOUNDS, method="bounded"
    )
    return float(result.x)


def _ks_distance(
    exponent: float, x_min: int, values: np.ndarray, counts: np.ndarray
) -> float:
    """Max gap between empirical and model CDF over the observed tail values."""
    empirical = np.cumsum(counts) / counts.sum()
    model = 1.0 - zeta(exponent, values + 1.0) / zeta(exponent, x_min)
    return float(np.max(np.abs(empirical - model)))


def _best_fit(samples: np.ndarray, min_tail: int) -> PowerLawFit:
    """Scan every admissible cutoff and keep the one with smallest KS distance."""
    samples = np.sort(np.asarray(samples, dtype=np.int64))
    samples = samples[samples >= 1]
    if len(samples) < min_tail:
        raise PowerLawFitError(
            f"Too few samples for a power-law fit: {len(samples)} < {min_tail}"
        )

    values, counts = np.unique(samples, return_counts=True)
    if len(values) < 2:
        raise PowerLawFitError("Power-law fit needs at least two distinct values")

    logs = np.log(values.astype(np.float64)) * counts
    suffix_counts = np.cumsum(counts[::-1])[::-1]
    suffix_logs = np.cumsum(logs[::-1])[::-1]

    best: Optional[PowerLawFit] = None
    # the last distinct value alone cannot be fitted, so stop one short
    for j in range(len(values) - 1):
        tail_count = int(suffix_counts[j])
        if tail_count < min_tail:
            break
        x_min = int(values[j])
        exponent = _fit_exponent(float(suffix_logs[j]), tail_count, x_min)
        distance = _ks_distance(exponent, x_min, values[j:].astype(np.float64), counts[j:])
        if best is None or distance < best.ks_distance:
            best = PowerLawFit(
                exponent=exponent,
                x_min=x_min,
                ks_distance=distance,
                p_value=None,
                sample_count=len(samples),
                tail_count=tail_count,
                replicates=0,
            )

    if best is None:
        raise PowerLawFitError(
            f"No cutoff leaves at least {min_tail} samples with two distinct values"
        )
    return best


def _bootstrap_p_value(
    samples: np.ndarray,
    fit: PowerLawFit,
    replicates: int,
    min_tail: int,
    rng: np.random.Generator,
) -> Optional[float]:
    """Fraction of synthetic samples that fit worse than the observed one.

    Each replicate keeps the sample size, draws the tail from the fitted law
    and resamples the body (values below the cutoff) from the data.
    """
    n = len(samples)
    body = samples[samples < fit.x_min]
    tail_share = fit.tail_count / n
    worse = 0
    valid = 0
    for _ in range(replicates):
        tail_size = int(rng.binomial(n, tail_share)) if len(body) else n
        tail = sample_discrete_power_law(fit.exponent, fit.x_min, None, tail_size, rng)
        synthetic = tail
        if n - tail_size > 0:
            synthetic = np.concatenate([rng.choice(body, n - tail_size), tail])
        try:
            distance = _best_fit(synthetic, min_tail).ks_distance
        except PowerLawFitError:
            continue
        valid += 1
        if distance >= fit.ks_distance:
            worse += 1
    if valid == 0:
        logger.warning("No bootstrap replicate could be fitted; p-value undefined")
        return None
    return worse / valid


def fit_power_law(
    samples: Sequence[int],
    replicates: int = DEFAULT_REPLICATES,
    min_tail: int = DEFAULT_MIN_TAIL,
    seed: Optional[int] = None,
) -> PowerLawFit:
    """Fit a discrete power law to positive integer samples.

    Set `replicates=0` to skip the bootstrap (p_value stays None).
    """
    array = np.asarray(samples, dtype=np.int64)
    fit = _best_fit(array, min_tail)
    if replicates > 0:
        rng = np.random.default_rng(seed)
        positive = np.sort(array[array >= 1])
        fit.p_value = _bootstrap_p_value(positive, fit, replicates, min_tail, rng)
        fit.replicates = replicates
    logger.debug(
        f"Power-law fit: exponent={fit.exponent:.3f} x_min={fit.x_min} "
        f"D={fit.ks_distance:.4f} p={fit.p_value}"
    )
    return fit
