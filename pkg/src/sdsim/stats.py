"""Samplers and moment estimators for run ensembles and bias distributions.

Skewness uses the adjusted Fisher-Pearson estimator

    G1 = g1 * sqrt(n (n - 1)) / (n - 2),   g1 = m3 / m2**1.5

with ``m_k`` the biased central sample moments (the ``bias=False`` skewness
of scipy and the default of most spreadsheet tools).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InsufficientData, InvalidParameter, MissingVariable, ZeroVariance


@dataclass(frozen=True)
class Exponential:
    rate: float = 1.0

    def analytic_skewness(self) -> float:
        return 2.0


@dataclass(frozen=True)
class LogNormal:
    mu: float = 0.0
    sigma: float = 1.0

    def analytic_skewness(self) -> float:
        w = math.exp(self.sigma ** 2)
        return (w + 2.0) * math.sqrt(w - 1.0)


@dataclass(frozen=True)
class Gamma:
    alpha: float = 1.0
    theta: float = 1.0

    def analytic_skewness(self) -> float:
        return 2.0 / math.sqrt(self.alpha)


Distribution = Union[Exponential, LogNormal, Gamma]


def sample(dist: Distribution, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` values; bitwise reproducible for a given seed.

    Exponential by inverse CDF, log-normal as exp of a normal deviate, gamma
    as a sum of ``alpha`` exponentials when ``alpha`` is an integer and by
    Marsaglia-Tsang squeeze/rejection otherwise (with the ``U**(1/alpha)``
    boost when ``alpha < 1``).
    """
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if isinstance(dist, Exponential):
        if not dist.rate > 0:
            raise InvalidParameter("rate must be positive")
        return -np.log1p(-rng.random(n)) / dist.rate
    if isinstance(dist, LogNormal):
        if not dist.sigma > 0:
            raise InvalidParameter("sigma must be positive")
        return np.exp(dist.mu + dist.sigma * rng.standard_normal(n))
    if isinstance(dist, Gamma):
        if not (dist.alpha > 0 and dist.theta > 0):
            raise InvalidParameter("alpha and theta must be positive")
        if float(dist.alpha).is_integer():
            k = int(dist.alpha)
            total = np.zeros(n)
            for _ in range(k):
                total -= np.log1p(-rng.random(n))
            return total * dist.theta
        return _gamma_mt(dist.alpha, n, rng) * dist.theta
    raise InvalidParameter(f"unsupported distribution {dist!r}")


def _gamma_mt(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    boost = alpha < 1.0
    a = alpha + 1.0 if boost else alpha
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(16, int((n - filled) * 1.1))
        x = rng.standard_normal(m)
        u = rng.random(m)
        v = (1.0 + c * x) ** 3
        ok = v > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            accept = ok & (np.log(u) < 0.5 * x * x + d - d * v + d * np.log(np.where(ok, v, 1.0)))
        got = d * v[accept]
        take = min(got.size, n - filled)
        out[filled:filled + take] = got[:take]
        filled += take
    if boost:
        out *= rng.random(n) ** (1.0 / alpha)
    return out


def skewness(xs: Sequence[float]) -> float:
    """Adjusted Fisher-Pearson sample skewness."""
    x = np.asarray(xs, dtype=np.float64)
    n = x.size
    if n < 3:
        raise InsufficientData(f"skewness needs at least 3 values, got {n}")
    d = x - x.mean()
    m2 = np.mean(d * d)
    if m2 == 0.0:
        raise ZeroVariance("skewness is undefined for a constant sample")
    m3 = np.mean(d * d * d)
    g1 = m3 / m2 ** 1.5
    return float(g1 * math.sqrt(n * (n - 1)) / (n - 2))


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    sd: float
    skewness: Optional[float]

    def as_dict(self) -> dict:
        return asdict(self)


def describe(values: Sequence[float]) -> SampleSummary:
    """Mean, sample sd (0 for a single value) and skewness (None below n=3,
    0 for a constant sample)."""
    x = np.asarray(values, dtype=np.float64)
    n = int(x.size)
    if n == 0:
        raise InsufficientData("cannot summarize an empty sample")
    mean = float(x.mean())
    sd = float(x.std(ddof=1)) if n > 1 else 0.0
    skew: Optional[float] = None
    if n >= 3:
        try:
            skew = skewness(x)
        except ZeroVariance:
            skew = 0.0
    return SampleSummary(n=n, mean=mean, sd=sd, skewness=skew)


REDUCERS = ("time-mean", "final-value")


def reduce_run(result, variable: str, reducer: str = "time-mean") -> float:
    if variable not in result.series:
        raise MissingVariable(variable)
    if reducer == "time-mean":
        return result.time_mean(variable)
    if reducer == "final-value":
        return result.final(variable)
    raise ValueError(f"reducer must be one of {REDUCERS}, got {reducer!r}")


def summarize(ensemble, variable: str, reducer: str = "time-mean") -> SampleSummary:
    """Reduce each run to one scalar, then summarize across runs."""
    return describe([reduce_run(r, variable, reducer) for r in ensemble])
