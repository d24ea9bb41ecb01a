"""Limiting mod-Poisson functions and their truncations.

Phi_C(x) = prod_k (1 + (x-1)/k) exp(-(x-1)/k) = exp(-(x-1) * gamma_EM) / Gamma(x)
Phi_Omega(x) = prod_p (1 + (x-1)/p) exp(-(x-1)/p)
Phi_omega = Phi_C * Phi_Omega

All functions accept scalars or arrays of x >= 0 and return the same shape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
from scipy.special import poch, rgamma

from .errors import DomainError
from .primes import PrimeTable, cached_sieve, harmonic

EULER_GAMMA = 0.577215664901532860606512090082
# sum over primes of 1/p^2
PRIME_ZETA_2 = 0.452247420041065498506543364832

_DIRECT_MAX_K = 1000
_CHUNK = 1 << 22


def _as_grid(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(vals: np.ndarray, scalar: bool):
    return float(vals) if scalar else vals


def phi_C_trunc(k: int, x):
    """phi_k(x) = prod_{l<=k} (1 + (x-1)/l) exp(-(x-1)/l).

    Direct product for k <= 1000. Larger k use the exact Gamma-ratio form
    prod_l (1 + u/l) = Gamma(k+1+u) / (Gamma(k+1) Gamma(1+u)) with u = x - 1,
    i.e. phi_k(x) = poch(k+1, u) exp(-u H_k) / Gamma(x), which costs O(1) per
    point. The l = 1 factor is taken as x itself, since 1 + (x - 1) loses x
    entirely for tiny x.
    """
    if k < 1:
        raise DomainError("truncation k must be >= 1")
    xs, scalar = _as_grid(x)
    x1 = np.atleast_1d(xs)
    u = x1 - 1.0
    if k <= _DIRECT_MAX_K:
        ell = np.arange(2, k + 1, dtype=float)
        ratio = u[:, None] / ell[None, :]
        vals = x1 * np.exp(-u) * np.prod((1.0 + ratio) * np.exp(-ratio), axis=1)
    else:
        vals = poch(k + 1.0, u) * rgamma(x1) * np.exp(-u * harmonic(k))
    return _ret(vals.reshape(xs.shape), scalar)


def phi_C_closed(x):
    """Phi_C(x) = exp(-(x-1) gamma_EM) / Gamma(x); equals 0 at x = 0."""
    xs, scalar = _as_grid(x)
    if np.any(xs < 0):
        raise DomainError("phi_C_closed needs x >= 0")
    vals = np.exp(-(xs - 1.0) * EULER_GAMMA) * rgamma(xs)
    return _ret(vals, scalar)


def _log_prime_factors(primes: np.ndarray, u: np.ndarray) -> np.ndarray:
    p = primes.astype(float)
    acc = np.zeros(u.size)
    step = max(1, _CHUNK // max(1, u.size))
    for lo in range(0, p.size, step):
        r = u[:, None] / p[None, lo: lo + step]
        if np.any(1.0 + r <= 0):
            raise DomainError("a prime factor is nonpositive")
        acc += np.sum(np.log1p(r) - r, axis=1)
    return acc


def phi_Omega_trunc(table: PrimeTable | Sequence[int], x):
    """prod over the table's primes of (1 + (x-1)/p) exp(-(x-1)/p)."""
    primes = table.primes if isinstance(table, PrimeTable) else np.asarray(table)
    xs, scalar = _as_grid(x)
    if np.any(xs < 0):
        raise DomainError("phi_Omega_trunc needs x >= 0")
    u = np.atleast_1d(xs - 1.0)
    vals = np.exp(_log_prime_factors(primes, u))
    return _ret(vals.reshape(xs.shape), scalar)


def prime_cutoff(x, error_target: float) -> int:
    """Prime bound P for :func:`phi_Omega` at relative error below error_target.

    Past P the omitted log-factors are replaced by their quadratic term
    -(x-1)^2/2 * sum_{p>P} 1/p^2 (using the prime zeta value P(2)). For
    p >= 2|x-1| the cubic remainder of log((1+u)e^{-u}) is at most
    |u|^3 / (3 (1-|u|)), and sum_{m>P} 1/m^3 <= 1/(2 P^2), so the neglected log is
    at most a^3 / (6 P (P - a)) with a = max|x-1|.
    """
    if not error_target > 0:
        raise DomainError("error_target must be positive")
    a = float(np.max(np.abs(np.atleast_1d(np.asarray(x, dtype=float)) - 1.0)))
    t_max = math.log1p(error_target)
    P = max(3, math.ceil(2 * a) + 1)
    while a**3 / (6.0 * P * (P - a)) > t_max:
        P = math.ceil(P * 1.25)
    return P


def phi_Omega(x, error_target: float = 1e-10):
    """Full prime product Phi_Omega with a certified relative truncation error."""
    P = prime_cutoff(x, error_target)
    table = cached_sieve(P)
    xs, scalar = _as_grid(x)
    if np.any(xs < 0):
        raise DomainError("phi_Omega needs x >= 0")
    u = np.atleast_1d(xs - 1.0)
    p = table.primes.astype(float)
    tail_sq = PRIME_ZETA_2 - math.fsum(1.0 / (p * p))
    vals = np.exp(_log_prime_factors(table.primes, u) - 0.5 * u * u * tail_sq)
    return _ret(vals.reshape(xs.shape), scalar)


def phi_omega(x, error_target: float = 1e-10):
    """Phi_omega = Phi_C * Phi_Omega (Sathe-Selberg limiting function)."""
    return phi_C_closed(x) * phi_Omega(x, error_target)


def phi_generic(probs: Sequence[float], x):
    """prod_k (1 + p_k (x-1)) exp(-p_k (x-1)), the limit for independent Bernoulli sums."""
    p = np.asarray(probs, dtype=float)
    xs, scalar = _as_grid(x)
    u = np.atleast_1d(xs - 1.0)
    if p.size == 0:
        vals = np.ones(u.size)
    else:
        r = u[:, None] * p[None, :]
        vals = np.prod((1.0 + r) * np.exp(-r), axis=1)
    return _ret(vals.reshape(xs.shape), scalar)


@dataclass(frozen=True)
class LimitFunctionSpec:
    kind: Literal["C", "Omega", "omega", "generic"]
    truncation: int = 10**6
    probs: tuple[float, ...] | None = None
    error_target: float = 1e-10
    closed_form: bool = field(default=True)

    def __post_init__(self):
        if self.truncation < 1:
            raise DomainError("truncation must be >= 1")
        if not self.error_target > 0:
            raise DomainError("error_target must be positive")
        if self.kind == "generic" and self.probs is None:
            raise DomainError("generic limit needs probs")


def evaluate(spec: LimitFunctionSpec, x):
    if spec.kind == "C":
        return phi_C_closed(x) if spec.closed_form else phi_C_trunc(spec.truncation, x)
    if spec.kind == "Omega":
        return phi_Omega(x, spec.error_target)
    if spec.kind == "omega":
        return phi_omega(x, spec.error_target)
    return phi_generic(spec.probs, x)
