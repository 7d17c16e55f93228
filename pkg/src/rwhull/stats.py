"""Summaries, reference laws and the Kolmogorov-Smirnov distance.

The normal CDF is :func:`scipy.special.ndtr` (Cephes), accurate to a few ulp,
so no hand-rolled erf approximation is carried here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

KS_CRITICAL_1PCT = 1.63  # asymptotic 1% point of sqrt(n) * D_n


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class SampleSummary:
    count: int
    mean: float
    variance: float
    min: float
    max: float

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.count)

    @property
    def m2(self) -> float:
        return self.variance * (self.count - 1)

    def merge(self, other: "SampleSummary") -> "SampleSummary":
        """Pooled summary of two disjoint samples (Chan et al. update)."""
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return SampleSummary(n, mean, max(m2, 0.0) / (n - 1),
                             min(self.min, other.min), max(self.max, other.max))

    def to_dict(self) -> dict:
        return {"count": self.count, "mean": self.mean, "variance": self.variance,
                "std_error": self.std_error, "min": self.min, "max": self.max}


def summarize(samples) -> SampleSummary:
    """Mean and unbiased variance with compensated (fsum) accumulation."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    n = x.size
    if n < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {n}")
    mean = math.fsum(x) / n
    var = math.fsum((x - mean) ** 2) / (n - 1)
    return SampleSummary(n, mean, var, float(x.min()), float(x.max()))


class ReferenceCdf:
    name = ""

    def cdf(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class StandardNormal(ReferenceCdf):
    name = "standard_normal"

    def cdf(self, x):
        return ndtr(np.asarray(x, dtype=np.float64))


@dataclass(frozen=True)
class ScaledChiSq1(ReferenceCdf):
    """Law of ``c * zeta**2`` with zeta standard normal."""

    c: float
    name = "scaled_chisq1"

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"scale must be positive, got {self.c}")

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        pos = np.maximum(x, 0.0)
        return np.where(x > 0, 2.0 * ndtr(np.sqrt(pos / self.c)) - 1.0, 0.0)


@dataclass(frozen=True, eq=False)
class Empirical(ReferenceCdf):
    samples: np.ndarray
    name = "empirical"

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=np.float64).ravel())
        if s.size == 0:
            raise InsufficientDataError("empirical law needs samples")
        object.__setattr__(self, "samples", s)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.searchsorted(self.samples, x, side="right") / self.samples.size


def cdf(ref: ReferenceCdf, x):
    out = ref.cdf(x)
    return float(out) if np.ndim(out) == 0 else out


def ks_statistic(samples, ref: ReferenceCdf) -> float:
    """sup |F_n - F| using both one-sided gaps at the order statistics.

    For an :class:`Empirical` reference both step functions are compared on
    the union of their jump points."""
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    n = x.size
    if n < 10:
        raise InsufficientDataError(f"KS needs at least 10 samples, got {n}")
    if isinstance(ref, Empirical):
        pts = np.union1d(x, ref.samples)
        fn = np.searchsorted(x, pts, side="right") / n
        return float(np.max(np.abs(fn - ref.cdf(pts))))
    f = ref.cdf(x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    return float(min(1.0, max(d_plus, d_minus, 0.0)))


def ks_critical(n: int, c: float = KS_CRITICAL_1PCT) -> float:
    return c / math.sqrt(n)
