"""Expected ensemble accuracy when member accuracies are iid.

If ``p_1, ..., p_n`` are iid with mean ``mu`` and the profile is
``p_{n,k} = F(k/n)``, independence gives

    E[q] = sum_k F(k/n) * C(n,k) mu^k (1-mu)^(n-k),

which tends to ``F(mu)`` as ``n`` grows; for large ``n`` the ensemble
decision behaves like a Bernoulli(F(mu)) variable, so
``Var(q) <= F(mu) (1 - F(mu))``. The functions here evaluate those
quantities and a Monte-Carlo harness to check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cdf import Beta, CdfSpec, cdf_eval
from .errors import DegenerateSampleError, InfeasibleMomentsError, InvalidInputError
from .montecarlo import check_seed, chunks, run_split
from .pnk import profile_from_cdf

EXPECTED_MAX_N = 10**5
SAMPLE_CHUNK = 1 << 14


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not 0.0 <= mu <= 1.0:
        raise InvalidInputError(f"mu={mu} outside [0, 1]")
    return mu


def binomial_pmf(n: int, mu: float) -> np.ndarray:
    """Binomial(n, mu) masses, built outward from the mode by ratio updates."""
    pmf = np.zeros(n + 1)
    if mu == 0.0:
        pmf[0] = 1.0
        return pmf
    if mu == 1.0:
        pmf[n] = 1.0
        return pmf
    mode = min(n, int((n + 1) * mu))
    pmf[mode] = math.exp(
        math.lgamma(n + 1) - math.lgamma(mode + 1) - math.lgamma(n - mode + 1)
        + mode * math.log(mu) + (n - mode) * math.log1p(-mu)
    )
    odds = mu / (1.0 - mu)
    for k in range(mode, n):
        pmf[k + 1] = pmf[k] * (n - k) / (k + 1) * odds
        if pmf[k + 1] == 0.0:
            break
    for k in range(mode, 0, -1):
        pmf[k - 1] = pmf[k] * k / (n - k + 1) / odds
        if pmf[k - 1] == 0.0:
            break
    return pmf


def expected_accuracy(cdf: CdfSpec, mu: float, n: int) -> float:
    mu = _check_mu(mu)
    if int(n) != n or not 1 <= n <= EXPECTED_MAX_N:
        raise InvalidInputError(f"n must be an integer in [1, {EXPECTED_MAX_N}], got {n}")
    n = int(n)
    pmf = binomial_pmf(n, mu)
    ks = np.flatnonzero(pmf)
    return math.fsum(cdf(k / n) * pmf[k] for k in ks)


def asymptotic_accuracy(cdf: CdfSpec, mu: float) -> float:
    """Large-n limit of :func:`expected_accuracy`, i.e. ``F(mu)``."""
    return cdf_eval(cdf, _check_mu(mu))


def variance_bound(cdf: CdfSpec, mu: float) -> float:
    f = asymptotic_accuracy(cdf, mu)
    return f * (1.0 - f)


@dataclass(frozen=True)
class MomentSummary:
    mu: float
    sigma2: float

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise InvalidInputError(f"mean {self.mu} outside [0, 1]")
        if not 0.0 <= self.sigma2 <= self.mu * (1.0 - self.mu):
            raise InfeasibleMomentsError(
                f"variance {self.sigma2} outside [0, mu(1-mu)] = [0, {self.mu * (1 - self.mu)}]"
            )

    @classmethod
    def of(cls, samples: Sequence[float]) -> "MomentSummary":
        xs = np.asarray(samples, dtype=float)
        if xs.size < 2:
            raise InvalidInputError(f"need at least 2 samples, got {xs.size}")
        if ((xs < 0) | (xs > 1)).any():
            raise InvalidInputError("samples must lie in [0, 1]")
        m = float(xs.mean())
        v = float(np.mean((xs - m) ** 2))
        if v >= m * (1.0 - m):
            raise InfeasibleMomentsError(f"sample variance {v} >= m(1-m) = {m * (1 - m)}")
        return cls(m, v)


def beta_from_moments(mu: float, sigma2: float) -> Beta:
    if sigma2 == 0.0:
        raise DegenerateSampleError("zero variance; no Beta distribution matches")
    if not 0.0 < mu < 1.0 or sigma2 >= mu * (1.0 - mu):
        raise InfeasibleMomentsError(f"no Beta distribution has mean {mu} and variance {sigma2}")
    common = mu * (1.0 - mu) / sigma2 - 1.0
    return Beta(mu * common, (1.0 - mu) * common)


def beta_fit_moments(samples: Sequence[float]) -> Beta:
    """Method-of-moments Beta fit (population variance of the sample)."""
    xs = np.asarray(samples, dtype=float)
    if xs.size < 2:
        raise InvalidInputError(f"need at least 2 samples, got {xs.size}")
    if np.all(xs == xs[0]):
        raise DegenerateSampleError("all samples are equal; variance is zero")
    summary = MomentSummary.of(xs)
    return beta_from_moments(summary.mu, summary.sigma2)


@dataclass(frozen=True)
class AccuracySample:
    mean: float
    variance: float
    draws: int
    stderr_mean: float
    stderr_variance: float


def batch_accuracy(ps: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """``q_multi`` for each row of ``ps`` under one shared profile."""
    rows, n = ps.shape
    mass = np.ones((rows, 1))
    for j in range(n):
        p = ps[:, j:j + 1]
        nxt = np.empty((rows, j + 2))
        nxt[:, :-1] = mass * (1.0 - p)
        nxt[:, -1] = 0.0
        nxt[:, 1:] += mass * p
        mass = nxt
    return mass @ coef


def sample_ensemble_accuracy(
    p_cdf: CdfSpec,
    n: int,
    profile_cdf: CdfSpec,
    draws: int,
    seed: int,
    workers: int = 1,
) -> AccuracySample:
    """Mean and unbiased variance of ``q_multi`` over iid draws of member accuracies."""
    if int(draws) != draws or draws < 2:
        raise InvalidInputError(f"draws must be an integer >= 2, got {draws!r}")
    seed = check_seed(seed)
    coef = profile_from_cdf(n, profile_cdf).as_array()
    n = len(coef) - 1

    def work(rng: np.random.Generator, share: int) -> np.ndarray:
        parts = [batch_accuracy(p_cdf.sample(rng, (size, n)), coef) for size in chunks(share, SAMPLE_CHUNK)]
        return np.concatenate(parts) if parts else np.empty(0)

    q = np.concatenate(run_split(work, seed, int(draws), workers))
    if np.ptp(q) == 0.0:
        return AccuracySample(float(q[0]), 0.0, q.size, 0.0, 0.0)
    mean = float(q.mean())
    dev2 = (q - mean) ** 2
    var = float(dev2.sum() / (q.size - 1))
    return AccuracySample(
        mean=mean,
        variance=var,
        draws=q.size,
        stderr_mean=math.sqrt(var / q.size),
        stderr_variance=float(dev2.std(ddof=1) / math.sqrt(q.size)),
    )
