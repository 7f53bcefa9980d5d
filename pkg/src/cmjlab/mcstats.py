"""Small Monte Carlo statistics helpers shared across modules."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = ["Interval", "wilson_interval", "mean_interval", "normal_quantile"]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo


def normal_quantile(confidence: float) -> float:
    """Two-sided standard normal quantile for a confidence level."""
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    return float(stats.norm.ppf(0.5 * (1.0 + confidence)))


def wilson_interval(successes: int, n: int, confidence: float = 0.99) -> Interval:
    """Wilson score interval for a binomial proportion.

    Preferred over the normal interval here because the estimated
    probabilities are routinely extreme (0 or 1 observed successes).
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= successes <= n:
        raise ValueError("successes out of range")
    z = normal_quantile(confidence)
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    return Interval(max(0.0, center - half), min(1.0, center + half))


def mean_interval(samples: np.ndarray, confidence: float = 0.99) -> tuple[float, float, Interval]:
    """Sample mean, standard error and a normal confidence interval."""
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    if n < 2:
        raise ValueError("need at least two samples")
    m = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(n))
    z = normal_quantile(confidence)
    return m, se, Interval(m - z * se, m + z * se)
