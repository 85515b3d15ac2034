"""Binomial demand model of intersection throughput.

Vehicles waiting to cross one axis of an intersection at the start are
Bin(2*ell, k). LQF passes on the max of the two axes each cycle, SQF the
min, the random policy either one, so after j cycles the count is the max
(or min) of 2j independent copies of the base law.
"""

from __future__ import annotations

from math import lgamma, log, log1p

import numpy as np

from ..network import ParameterError

_POLICIES = ("lqf", "sqf", "rnd")
_EPS = 1e-12


def binom_pmf(n: int, p: float) -> np.ndarray:
    """Probabilities of 0..n successes, computed in log space."""
    if int(n) != n or n < 0:
        raise ParameterError("n", "must be a nonnegative integer")
    if not 0 <= p <= 1:
        raise ParameterError("p", "must lie in [0, 1]")
    n = int(n)
    if p == 0 or p == 1:
        pmf = np.zeros(n + 1)
        pmf[0 if p == 0 else n] = 1.0
        return pmf
    lp, lq = log(p), log1p(-p)
    logs = np.array(
        [lgamma(n + 1) - lgamma(i + 1) - lgamma(n - i + 1) + i * lp + (n - i) * lq for i in range(n + 1)]
    )
    pmf = np.exp(logs)
    return pmf / pmf.sum()


def binom_cdf(n: int, p: float, x):
    """P(X <= x) for X ~ Bin(n, p); exact 0 below the support and 1 at or above n."""
    cdf = np.minimum(np.cumsum(binom_pmf(n, p)), 1.0)
    cdf[-1] = 1.0
    xs = np.floor(np.asarray(x, dtype=float))
    idx = np.clip(xs, -1, n).astype(int)
    out = np.where(idx < 0, 0.0, cdf[np.maximum(idx, 0)])
    return float(out) if np.ndim(out) == 0 else out


def fn_j(policy: str, j: int, ell: int, k: float, n):
    """CDF of the per-axis count after j cycles under ``policy``."""
    policy = policy.lower()
    if policy not in _POLICIES:
        raise ParameterError("policy", f"must be one of {_POLICIES}")
    if j < (0 if policy == "rnd" else 1):
        raise ParameterError("j", "cycle index too small for this policy")
    base = binom_cdf(2 * ell, k, n)
    if policy == "lqf":
        return base ** (2 * j)
    if policy == "sqf":
        return 1.0 - (1.0 - base) ** (2 * j)
    return base


def _lower_quantiles(cdf: np.ndarray, percentiles) -> np.ndarray:
    """Smallest support index whose CDF reaches each percentile."""
    pct = np.asarray(percentiles, dtype=float)
    if ((pct <= 0) | (pct >= 1)).any():
        raise ParameterError("percentiles", "must lie in (0, 1)")
    return np.searchsorted(cdf, pct - _EPS, side="left")


def flow_quantiles(policy: str, j: int, ell: int, k: float, percentiles, u: float = 1.0):
    """Quantiles of the per-lane flow u*N/(8*ell) after j cycles."""
    support = np.arange(2 * ell + 1)
    cdf = np.asarray(fn_j(policy, j, ell, k, support))
    return u * _lower_quantiles(cdf, percentiles) / (8 * ell)


def min_two_binomials_quantiles(n: int, k: float, percentiles) -> np.ndarray:
    """Quantiles of min(X1, X2) with X1, X2 iid Bin(2n, k)."""
    if n < 1:
        raise ParameterError("n", "must be >= 1")
    support = np.arange(2 * n + 1)
    base = binom_cdf(2 * n, k, support)
    return _lower_quantiles(1.0 - (1.0 - base) ** 2, percentiles)


def bernoulli_bands(policies, js, ell: int, densities, percentiles=(0.05, 0.95)):
    """Rows (policy, j, ell, k, q_low, q_high) for plotting demand bands."""
    rows = []
    for pol in policies:
        for j in js:
            for k in densities:
                lo, hi = flow_quantiles(pol, j, ell, float(k), percentiles)
                rows.append((pol, j, ell, float(k), float(lo), float(hi)))
    return rows
