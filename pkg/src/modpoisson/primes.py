"""Prime sieve and the model constants derived from the primes up to n."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import CapacityError, DomainError, EmptyTableError, ModelUndefinedError

# 10**8 odd-only flags is 50 MB; larger requests must raise max_n explicitly.
SIEVE_BUDGET = 10**8

VConvention = Literal["proof", "notations"]


def compensated_cumsum(values) -> np.ndarray:
    """Running sums with Neumaier compensation, accumulated in the given order."""
    out = np.empty(len(values))
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values.tolist() if isinstance(values, np.ndarray) else values):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = total + comp
    return out


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Ascending primes <= limit with running sums of their reciprocals.

    ``recip_prefix[i]`` is the sum of 1/p over the first i+1 primes, so the last
    entry is the prime harmonic sum at ``limit``.
    """

    limit: int
    primes: np.ndarray
    recip_prefix: np.ndarray

    def __post_init__(self):
        self.primes.setflags(write=False)
        self.recip_prefix.setflags(write=False)

    @property
    def count(self) -> int:
        return len(self.primes)

    @property
    def prime_harmonic(self) -> float:
        return float(self.recip_prefix[-1])

    def restrict(self, m: int) -> "PrimeTable":
        """Table for the primes <= m (m <= limit), sharing the prefix sums."""
        if m > self.limit:
            raise DomainError(f"cannot restrict table of limit {self.limit} to {m}")
        j = int(np.searchsorted(self.primes, m, side="right"))
        if j == 0:
            raise EmptyTableError(f"no primes <= {m}")
        return PrimeTable(m, self.primes[:j].copy(), self.recip_prefix[:j].copy())

    @classmethod
    def from_primes(cls, primes, limit: int | None = None) -> "PrimeTable":
        """Table over an explicit ascending list of primes (used for tiny instances)."""
        arr = np.asarray(primes, dtype=np.int64)
        if arr.size == 0:
            raise EmptyTableError("empty prime list")
        if np.any(np.diff(arr) <= 0):
            raise DomainError("primes must be strictly ascending")
        return cls(int(limit if limit is not None else arr[-1]), arr,
                   compensated_cumsum(1.0 / arr.astype(float)))


def prime_flags(n: int, max_n: int = SIEVE_BUDGET) -> np.ndarray:
    """Boolean array ``is_prime[0..n]``."""
    if n > max_n:
        raise CapacityError(f"n={n} exceeds sieve budget {max_n}")
    flags = np.zeros(n + 1, dtype=bool)
    if n < 2:
        return flags
    # odd-only sieve: index i stands for 2i+1
    odd = np.ones((n + 1) // 2, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2::p] = False
    flags[1::2] = odd[: len(flags[1::2])]
    flags[2] = True
    return flags


def sieve(n: int, max_n: int = SIEVE_BUDGET) -> PrimeTable:
    """All primes <= n, ascending, with compensated reciprocal prefix sums."""
    if n < 2:
        raise EmptyTableError(f"no primes <= {n}")
    primes = np.flatnonzero(prime_flags(n, max_n)).astype(np.int64)
    return PrimeTable(int(n), primes, compensated_cumsum(1.0 / primes.astype(float)))


@lru_cache(maxsize=8)
def cached_sieve(n: int) -> PrimeTable:
    return sieve(n)


def harmonic(k: int) -> float:
    """H_k = 1 + 1/2 + ... + 1/k, correctly rounded via ``math.fsum``."""
    if k < 1:
        raise DomainError(f"harmonic number needs k >= 1, got {k}")
    return math.fsum(1.0 / j for j in range(1, k + 1))


@dataclass(frozen=True)
class ModelParams:
    """Frozen constants of the penalised model at a given n.

    gamma_n is the prime harmonic sum, k_n its floor, and v_n the tilt applied
    to every prime Bernoulli. Tiny oracle instances build this directly with
    arbitrary (gamma_n, k_n, v_n).
    """

    n: int
    gamma_n: float
    k_n: int
    v_n: float
    pi_n: int

    def __post_init__(self):
        if self.gamma_n <= 0:
            raise DomainError("gamma_n must be positive")
        if self.k_n < 1:
            raise ModelUndefinedError(f"k_n = {self.k_n} at n = {self.n}")
        if not 0 < self.v_n <= 1:
            raise DomainError(f"v_n must lie in (0, 1], got {self.v_n}")


def params(n: int, table: PrimeTable | None = None,
           v_convention: VConvention = "proof") -> ModelParams:
    """Model constants at n.

    ``v_convention="proof"`` gives v_n = exp(-H_{k_n}/gamma_n), which makes the
    penalisation weight factor exactly into a tilt; ``"notations"`` divides by
    k_n instead and is only meant for sensitivity reports.
    """
    if table is None:
        table = sieve(n)
    elif table.limit != n:
        table = table.restrict(n)
    gamma = table.prime_harmonic
    k = math.floor(gamma)
    if k < 1:
        raise ModelUndefinedError(f"k_n = floor({gamma:.6f}) = 0 at n = {n}")
    denom = gamma if v_convention == "proof" else float(k)
    v = math.exp(-harmonic(k) / denom)
    return ModelParams(n=int(n), gamma_n=gamma, k_n=k, v_n=v, pi_n=table.count)
