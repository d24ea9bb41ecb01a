"""Exact finite laws on {0, ..., K} and the measure transforms used by the model.

Every transform returns a fresh, renormalised :class:`DiscreteDist`. Weights are
applied in log space so that tilts by large x and high moment biases on long
supports neither overflow nor underflow prematurely.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from .errors import DegenerateError, DomainError

NORM_TOL = 1e-12
# switch pgf to log space past this exponent
_LOG_PGF_THRESHOLD = 600.0


@dataclass(frozen=True, eq=False)
class DiscreteDist:
    """Probability mass function on the integers 0..support_max."""

    pmf: np.ndarray

    def __post_init__(self):
        pmf = np.array(self.pmf, dtype=float, copy=True)
        if pmf.ndim != 1 or pmf.size == 0:
            raise DomainError("pmf must be a non-empty 1-D array")
        if np.any(pmf < 0) or not np.all(np.isfinite(pmf)):
            raise DomainError("pmf entries must be finite and nonnegative")
        total = math.fsum(pmf)
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(f"pmf sums to {total!r}, not 1")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)

    @classmethod
    def from_weights(cls, weights) -> "DiscreteDist":
        w = np.asarray(weights, dtype=float)
        total = math.fsum(w)
        if not total > 0:
            raise DegenerateError("weights have zero total mass")
        return cls(w / total)

    @classmethod
    def point(cls, m: int) -> "DiscreteDist":
        pmf = np.zeros(m + 1)
        pmf[m] = 1.0
        return cls(pmf)

    @classmethod
    def empirical(cls, samples) -> "DiscreteDist":
        s = np.asarray(samples, dtype=np.int64)
        if s.size == 0:
            raise DomainError("no samples")
        return cls(np.bincount(s) / s.size)

    @property
    def support_max(self) -> int:
        return self.pmf.size - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.pmf.size)

    def mean(self) -> float:
        return self.moment(1)

    def moment(self, ell: int) -> float:
        return math.fsum(self.support.astype(float) ** ell * self.pmf)

    def variance(self) -> float:
        m = self.mean()
        return math.fsum((self.support - m) ** 2 * self.pmf)

    def cdf(self) -> np.ndarray:
        return np.minimum(np.cumsum(self.pmf), 1.0)

    def log_pmf(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.pmf)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF draws."""
        cdf = self.cdf()
        cdf[-1] = 1.0
        return np.searchsorted(cdf, rng.random(size), side="right").astype(np.int64)


def _normalise_log(logw: np.ndarray) -> DiscreteDist:
    top = np.max(logw)
    if not np.isfinite(top):
        raise DegenerateError("all weights vanish")
    w = np.exp(logw - top)
    return DiscreteDist(w / math.fsum(w))


def bernoulli_sum(probs: Iterable[float]) -> DiscreteDist:
    """Law of a sum of independent Bernoulli variables, by exact convolution.

    Trailing entries that underflow to exactly 0.0 are dropped, so for long
    lists of small probabilities the support stops growing once the upper tail
    is below the smallest subnormal.
    """
    ps = np.asarray(list(probs), dtype=float)
    if np.any((ps < 0) | (ps > 1)) or not np.all(np.isfinite(ps)):
        raise DomainError("Bernoulli probabilities must lie in [0, 1]")
    buf = np.zeros(ps.size + 1)
    buf[0] = 1.0
    top = 0
    for p in ps.tolist():
        q = 1.0 - p
        buf[1: top + 2] = buf[1: top + 2] * q + buf[: top + 1] * p
        buf[0] *= q
        top += 1
        while top > 0 and buf[top] == 0.0:
            top -= 1
    pmf = buf[: top + 1]
    return DiscreteDist(pmf / math.fsum(pmf))


def poisson_truncated(gamma: float, eps: float) -> DiscreteDist:
    """Poisson(gamma) cut at the smallest K with P(P > K) < eps, renormalised."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    K = int(gamma)
    while stats.poisson.sf(K, gamma) >= eps:
        K += max(1, int(math.sqrt(gamma)) // 4)
    while K > 0 and stats.poisson.sf(K - 1, gamma) < eps:
        K -= 1
    logp = stats.poisson.logpmf(np.arange(K + 1), gamma)
    return _normalise_log(logp)


def pgf(d: DiscreteDist, x: float) -> float:
    """E[x^X] by Horner's rule (log space for large x on long supports)."""
    if x > 1 and d.support_max * math.log(x) > _LOG_PGF_THRESHOLD:
        return math.exp(log_pgf(d, x))
    acc = 0.0
    for c in d.pmf[::-1].tolist():
        acc = acc * x + c
    return acc


def log_pgf(d: DiscreteDist, x: float) -> float:
    if x <= 0:
        raise DomainError("log_pgf needs x > 0")
    return float(logsumexp(d.log_pmf() + d.support * math.log(x)))


def tilt(d: DiscreteDist, x: float) -> DiscreteDist:
    """Exponential bias: pmf[k] * x**k / E[x^X]."""
    if not x > 0:
        raise DomainError(f"tilt parameter must be positive, got {x}")
    if x == 1:
        return d
    return _normalise_log(d.log_pmf() + d.support * math.log(x))


def size_bias_iter(d: DiscreteDist, ell: int) -> DiscreteDist:
    """Penalisation by k -> k**ell, i.e. ell iterated size-bias transforms."""
    if ell < 0:
        raise DomainError("ell must be >= 0")
    if ell == 0:
        return d
    with np.errstate(divide="ignore"):
        logk = np.log(d.support.astype(float))
    try:
        return _normalise_log(d.log_pmf() + ell * logk)
    except DegenerateError:
        raise DegenerateError("all mass sits at 0; size bias undefined") from None


def size_bias(d: DiscreteDist) -> DiscreteDist:
    """Size-bias transform pmf[k] * k / E[X]."""
    if not d.mean() > 0:
        raise DegenerateError("mean is zero; size bias undefined")
    return size_bias_iter(d, 1)


def _weights(w, n: int) -> np.ndarray:
    ks = np.arange(n)
    if callable(w):
        try:
            vals = np.asarray(w(ks), dtype=float)
        except (TypeError, ValueError):
            vals = None
        if vals is None or vals.shape != (n,):
            vals = np.array([w(int(k)) for k in ks], dtype=float)
        return vals
    vals = np.asarray(w, dtype=float)
    if vals.shape != (n,):
        raise DomainError(f"weight array has shape {vals.shape}, expected ({n},)")
    return vals


def penalise(d: DiscreteDist, w: Callable[[np.ndarray], np.ndarray] | Sequence[float]) -> DiscreteDist:
    """Reweight by a nonnegative function of the value and renormalise.

    ``w`` may be a callable (tried vectorised on the support first, then
    element by element) or an explicit array of weights over the support.
    """
    vals = _weights(w, d.pmf.size)
    if np.any(vals < 0) or np.any(np.isnan(vals)):
        raise DomainError("penalisation weights must be nonnegative")
    raw = vals * d.pmf
    total = math.fsum(raw)
    if not total > 0:
        raise DegenerateError("penalisation has zero normaliser")
    return DiscreteDist(raw / total)


def penalise_log(d: DiscreteDist, logw: np.ndarray) -> DiscreteDist:
    """Penalise by exp(logw); -inf entries mean zero weight."""
    logw = np.asarray(logw, dtype=float)
    if logw.shape != d.pmf.shape:
        raise DomainError("log-weight shape mismatch")
    return _normalise_log(d.log_pmf() + logw)


def convolve(a: DiscreteDist, b: DiscreteDist) -> DiscreteDist:
    pmf = np.convolve(a.pmf, b.pmf)
    return DiscreteDist(pmf / math.fsum(pmf))


def shift(d: DiscreteDist, m: int) -> DiscreteDist:
    """Law of X + m for a nonnegative integer m."""
    return DiscreteDist(np.concatenate([np.zeros(m), d.pmf]))


def mixture(weights: Sequence[float], dists: Sequence[DiscreteDist]) -> DiscreteDist:
    n = max(d.pmf.size for d in dists)
    acc = np.zeros(n)
    for w, d in zip(weights, dists):
        acc[: d.pmf.size] += w * d.pmf
    return DiscreteDist.from_weights(acc)


def total_variation(d1: DiscreteDist, d2: DiscreteDist) -> float:
    n = max(d1.pmf.size, d2.pmf.size)
    a = np.zeros(n)
    b = np.zeros(n)
    a[: d1.pmf.size] = d1.pmf
    b[: d2.pmf.size] = d2.pmf
    return 0.5 * math.fsum(np.abs(a - b))
