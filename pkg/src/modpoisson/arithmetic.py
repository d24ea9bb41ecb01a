"""Number-theoretic ground truth: omega(m) for m <= n and diagnostics on it."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .dist import DiscreteDist, pgf, poisson_truncated
from .errors import DomainError
from .limiting import phi_omega
from .model import dist_Q, mod_poisson_ratio
from .primes import SIEVE_BUDGET, PrimeTable, cached_sieve, sieve


@dataclass(frozen=True, eq=False)
class OmegaTable:
    """``omega[m]`` = number of distinct prime divisors of m; index 0 is unused."""

    limit: int
    omega: np.ndarray


def omega_sieve(n: int, table: PrimeTable | None = None, max_n: int = SIEVE_BUDGET) -> OmegaTable:
    """Add one to every multiple of every prime p <= n."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if table is None:
        table = sieve(max(n, 2), max_n=max_n)
    elif table.limit < n:
        raise DomainError("prime table too short")
    om = np.zeros(n + 1, dtype=np.uint8)  # omega(m) <= 8 for m <= 10**8
    for p in table.primes.tolist():
        if p > n:
            break
        om[p::p] += 1
    om.setflags(write=False)
    return OmegaTable(n, om)


def trial_division_omega(m: int) -> int:
    count = 0
    d = 2
    while d * d <= m:
        if m % d == 0:
            count += 1
            while m % d == 0:
                m //= d
        d += 1
    return count + (1 if m > 1 else 0)


def dist_omega_uniform(n: int, omega: OmegaTable | None = None) -> DiscreteDist:
    """Law of omega(U_n) with U_n uniform on {1, ..., n}."""
    if omega is None:
        omega = omega_sieve(n)
    counts = np.bincount(omega.omega[1: n + 1])
    return DiscreteDist(counts / n)


def sathe_selberg_ratio(n: int, x, omega: OmegaTable | None = None,
                        table: PrimeTable | None = None):
    """Raw mod-Poisson ratio of omega(U_n) at speed gamma_n = sum_{p<=n} 1/p."""
    if n < 3:
        raise DomainError("n must be >= 3")
    d = dist_omega_uniform(n, omega)
    gamma = (table or cached_sieve(n)).restrict(n).prime_harmonic
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    vals = np.array([float(mod_poisson_ratio(pgf(d, xi), gamma, xi)) for xi in xs])
    return float(vals[0]) if np.ndim(x) == 0 else vals


def fit_exponential_factor(xs, ratios, reference) -> float:
    """Least-squares c in log(ratio / reference) = c (x - 1).

    Limiting functions are only defined up to exp(c (x - 1)); points with
    x = 1 or with a zero ratio or reference carry no information and are skipped.
    """
    xs = np.asarray(xs, dtype=float)
    r = np.asarray(ratios, dtype=float)
    ref = np.asarray(reference, dtype=float)
    keep = (xs != 1) & (r > 0) & (ref > 0)
    if not np.any(keep):
        return 0.0
    u = xs[keep] - 1.0
    y = np.log(r[keep] / ref[keep])
    return float(np.dot(u, y) / np.dot(u, u))


@dataclass(frozen=True)
class FittedRatios:
    n: int
    c: float
    xs: np.ndarray
    raw: np.ndarray
    fitted: np.ndarray
    reference: np.ndarray

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.fitted - self.reference)


def sathe_selberg_fit(n: int, xs, omega: OmegaTable | None = None) -> FittedRatios:
    """Raw ratios, the fitted exponential factor, and the corrected ratios vs Phi_omega."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    raw = sathe_selberg_ratio(n, xs, omega)
    ref = phi_omega(xs)
    c = fit_exponential_factor(xs, raw, ref)
    fitted = raw * np.exp(-c * (xs - 1.0))
    return FittedRatios(n, c, xs, raw, fitted, ref)


@dataclass(frozen=True)
class LocalLimitRow:
    k: int
    p_omega: float
    p_poisson_phi: float
    p_Q: float


def local_limit_report(n: int, omega: OmegaTable | None = None) -> list[LocalLimitRow]:
    """Compare P(omega(U_n) = k) with P(P = k) Phi_omega(k / L) and P(Q_L = k), L = log log n.

    Rows cover k = 0 .. floor(2 L).
    """
    if n < 1000:
        raise DomainError("local limit report needs n >= 1000")
    L = math.log(math.log(n))
    d = dist_omega_uniform(n, omega)
    pois = poisson_truncated(L, 1e-15)
    q = dist_Q(phi_omega, L)
    rows = []
    for k in range(0, int(2 * L) + 1):
        pk = float(d.pmf[k]) if k < d.pmf.size else 0.0
        pp = float(pois.pmf[k]) if k < pois.pmf.size else 0.0
        pq = float(q.pmf[k]) if k < q.pmf.size else 0.0
        rows.append(LocalLimitRow(k, pk, pp * float(phi_omega(k / L)), pq))
    return rows


def erdos_kac_stat(law, gamma: float) -> float:
    """Kolmogorov distance between (X - gamma)/sqrt(gamma) and N(0, 1).

    ``law`` is a :class:`DiscreteDist` or an array of integer samples. For a
    lattice law the supremum is attained at a jump, approached either from the
    left (CDF before the jump) or at the jump itself.
    """
    if not gamma > 1:
        raise DomainError("gamma must exceed 1")
    d = law if isinstance(law, DiscreteDist) else DiscreteDist.empirical(law)
    z = (d.support - gamma) / math.sqrt(gamma)
    phi = ndtr(z)
    cdf = d.cdf()
    left = np.concatenate([[0.0], cdf[:-1]])
    return float(max(np.max(np.abs(cdf - phi)), np.max(np.abs(left - phi))))
