"""Independent, penalised and pathwise models for the number of prime divisors.

Exact laws
    Omega_n     sum of independent Bernoulli(1/p), p <= n
    Omega~_n    the same sum tilted by v_n, i.e. Bernoulli(v/(p+v-1))
    Omega'_n    Omega_n penalised by Phi_C(k/gamma_n)
    Omega''_n   Omega_n penalised by phi_{k_n}(k/gamma_n)

Pathwise constructions of Omega''_n (``scheme``)
    "iid"    C' drawn from its own law, indices i.i.d. from the index law, the
             indexed Bernoulli variables removed and replaced by the number of
             distinct indices.
    "exact"  C' drawn from its law reweighted by E[Omega~^l]; the number j of
             forced primes drawn with weight S(l, j) E[(Omega~)_j]; a j-set of
             distinct indices drawn with probability proportional to the product
             of the Bernoulli means; result j + sum of the other Bernoullis.
             This reproduces the penalised law exactly.

The two schemes coincide when C' <= 1 almost surely (k_n = 1).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy.special import logsumexp

from .dist import (
    DiscreteDist,
    bernoulli_sum,
    mixture,
    penalise,
    penalise_log,
    pgf,
    poisson_truncated,
    shift,
    size_bias,
)
from .errors import CapacityError, DomainError
from .limiting import phi_C_closed, phi_C_trunc
from .primes import ModelParams, PrimeTable

Convention = Literal["lemma", "paper"]
Scheme = Literal["iid", "exact"]

BRUTE_MAX_PRIMES = 8
BRUTE_MAX_K = 4
# cells of the uniform matrix drawn per sampling chunk
_CHUNK_CELLS = 1 << 22


def _table_for(params: ModelParams, table: PrimeTable) -> PrimeTable:
    if table.count == params.pi_n:
        return table
    if table.limit >= params.n:
        sub = table.restrict(params.n)
        if sub.count == params.pi_n:
            return sub
    raise DomainError(f"table ({table.count} primes) does not match pi_n = {params.pi_n}")


def prime_probs(params: ModelParams, table: PrimeTable) -> np.ndarray:
    return 1.0 / _table_for(params, table).primes.astype(float)


def tilted_probs(params: ModelParams, table: PrimeTable) -> np.ndarray:
    """P(B_p(v) = 1) = v / (p + v - 1)."""
    p = _table_for(params, table).primes.astype(float)
    return params.v_n / (p + params.v_n - 1.0)


def cprime_probs(params: ModelParams) -> np.ndarray:
    """P(B'_l(1/gamma) = 1) = 1 / (1 + gamma (l - 1)), l = 1..k_n."""
    ell = np.arange(1, params.k_n + 1, dtype=float)
    return 1.0 / (1.0 + params.gamma_n * (ell - 1.0))


def dist_omega_indep(params: ModelParams, table: PrimeTable) -> DiscreteDist:
    return bernoulli_sum(prime_probs(params, table))


def dist_omega_tilted(params: ModelParams, table: PrimeTable) -> DiscreteDist:
    return bernoulli_sum(tilted_probs(params, table))


def dist_omega_prime(params: ModelParams, table: PrimeTable) -> DiscreteDist:
    g = params.gamma_n
    return penalise(dist_omega_indep(params, table), lambda k: phi_C_closed(k / g))


def penalisation_normaliser(params: ModelParams, table: PrimeTable, truncated: bool = False) -> float:
    """E[Phi_C(Omega_n/gamma_n)], or with phi_{k_n} when ``truncated``."""
    d = dist_omega_indep(params, table)
    x = d.support / params.gamma_n
    w = phi_C_trunc(params.k_n, x) if truncated else phi_C_closed(x)
    return math.fsum(w * d.pmf)


def dist_omega_dprime(params: ModelParams, table: PrimeTable) -> DiscreteDist:
    """Exact law of Omega''_n: Omega_n penalised by phi_{k_n}(k / gamma_n)."""
    g, k = params.gamma_n, params.k_n
    return penalise(dist_omega_indep(params, table), lambda m: phi_C_trunc(k, m / g))


def dist_Cprime(params: ModelParams) -> DiscreteDist:
    return bernoulli_sum(cprime_probs(params))


def _log_moment_weights(support: np.ndarray, cprime: DiscreteDist) -> np.ndarray:
    """log E[m^{C'}] for every m in the support (C' >= 0)."""
    ell = np.arange(cprime.pmf.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        logm = np.log(support.astype(float))
        terms = cprime.log_pmf()[None, :] + np.where(ell[None, :] == 0, 0.0, ell[None, :] * logm[:, None])
    return logsumexp(terms, axis=1)


def dist_dprime_identity(params: ModelParams, table: PrimeTable) -> DiscreteDist:
    """Law with pmf proportional to P(Omega~_n = m) E[m^{C'_n}].

    This is the law the pathwise construction targets for the given
    (gamma_n, k_n, v_n); it equals :func:`dist_omega_dprime` when
    v_n = exp(-H_{k_n}/gamma_n). The m^l weights are handled in log space.
    """
    tilted = dist_omega_tilted(params, table)
    return penalise_log(tilted, _log_moment_weights(tilted.support, dist_Cprime(params)))


def pgf_dprime_identity(params: ModelParams, table: PrimeTable, x: float) -> float:
    """E[(x v)^Omega Omega^{C'}] / E[v^Omega Omega^{C'}] from the laws of Omega_n and C'_n."""
    d = dist_omega_indep(params, table)
    logw = _log_moment_weights(d.support, dist_Cprime(params)) + d.log_pmf()
    logv = math.log(params.v_n)
    den = logsumexp(logw + d.support * logv)
    if x == 0:
        return math.exp(logw[0] - den)
    num = logsumexp(logw + d.support * (logv + math.log(x)))
    return math.exp(num - den)


@dataclass(frozen=True, eq=False)
class IndexLaw:
    """Law of the random prime index I on {0, ..., pi(n)-1} (0-based)."""

    weights: np.ndarray
    convention: Convention

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w <= 0):
            raise DomainError("index weights must be positive")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise DomainError("index weights must sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        cdf = np.cumsum(w)
        cdf[-1] = 1.0
        cdf.setflags(write=False)
        object.__setattr__(self, "_cdf", cdf)

    @property
    def size(self) -> int:
        return self.weights.size

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return np.searchsorted(self._cdf, rng.random(size), side="right")


def index_law(params: ModelParams, table: PrimeTable, convention: Convention = "lemma") -> IndexLaw:
    """Index law. "lemma": proportional to E[B_p(v)] = v/(p+v-1); "paper": to 1/(p+v+1)."""
    p = _table_for(params, table).primes.astype(float)
    if convention == "lemma":
        raw = params.v_n / (p + params.v_n - 1.0)
    elif convention == "paper":
        raw = 1.0 / (p + params.v_n + 1.0)
    else:
        raise DomainError(f"unknown convention {convention!r}")
    return IndexLaw(raw / math.fsum(raw), convention)


def paintbox_delta(indices) -> int:
    """Number of blocks of the paintbox partition, i.e. distinct indices."""
    return len(set(np.asarray(indices).ravel().tolist()))


def paintbox_delta_law(weights, ell: int) -> DiscreteDist:
    """Exact law of the number of distinct values among ell i.i.d. draws from ``weights``."""
    w = np.asarray(weights, dtype=float)
    if w.size**ell > 10**7:
        raise CapacityError("paintbox enumeration too large")
    acc = np.zeros(ell + 1)
    for tup in itertools.product(range(w.size), repeat=ell):
        acc[len(set(tup))] += math.prod(w[i] for i in tup)
    return DiscreteDist.from_weights(acc)


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by (seed, stream_id).

    Distinct stream ids map to independent children of one ``SeedSequence``.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


@lru_cache(maxsize=64)
def stirling2(n: int, k: int) -> int:
    """Stirling numbers of the second kind."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


@dataclass(frozen=True, eq=False)
class ExactSchemeWeights:
    """Mixing weights of the exact pathwise scheme.

    ``cprime[l]`` is P(C' = l) E[Omega~^l] / E[Omega~^{C'}], and
    ``forced[l][j]`` is S(l, j) E[(Omega~)_j] / E[Omega~^l].
    """

    cprime: np.ndarray
    forced: list = field(repr=False)


def exact_scheme_weights(params: ModelParams, table: PrimeTable) -> ExactSchemeWeights:
    tilted = dist_omega_tilted(params, table)
    m = tilted.support.astype(float)
    cp = dist_Cprime(params)
    kmax = cp.support_max
    falling = [math.fsum(np.prod([m - i for i in range(j)], axis=0) * tilted.pmf) if j else 1.0
               for j in range(kmax + 1)]
    forced = []
    raw_c = np.zeros(kmax + 1)
    for ell in range(kmax + 1):
        fw = np.array([stirling2(ell, j) * falling[j] for j in range(ell + 1)], dtype=float)
        tot = math.fsum(fw)
        raw_c[ell] = cp.pmf[ell] * tot
        forced.append(fw / tot if tot > 0 else fw)
    return ExactSchemeWeights(raw_c / math.fsum(raw_c), forced)


def _distinct_mask(idx: np.ndarray, valid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort each row's valid indices; mark the first occurrence of each value."""
    big = np.iinfo(np.int64).max
    s = np.sort(np.where(valid, idx, big), axis=1)
    first = s != big
    first[:, 1:] &= s[:, 1:] != s[:, :-1]
    return s, first


def _draw_distinct(law: IndexLaw, rng: np.random.Generator, j: np.ndarray, width: int) -> np.ndarray:
    """Rows of j distinct indices, P(set) proportional to the product of weights.

    i.i.d. draws conditioned on being pairwise distinct, by rejection per row.
    """
    n = j.size
    out = law.sample(rng, (n, width))
    cols = np.arange(width)
    todo = np.arange(n)
    while todo.size:
        sub = out[todo]
        valid = cols[None, :] < j[todo, None]
        _, first = _distinct_mask(sub, valid)
        bad = first.sum(axis=1) < j[todo]
        todo = todo[bad]
        if todo.size:
            out[todo] = law.sample(rng, (todo.size, width))
    return out


def _sample_indices(params, table, law, rng, size, scheme):
    """Draw the forced index matrix and a validity mask for each sample."""
    if scheme == "iid":
        c = dist_Cprime(params).sample(rng, size)
        width = max(1, int(c.max(initial=0)))
        idx = law.sample(rng, (size, width))
        valid = np.arange(width)[None, :] < c[:, None]
        return idx, valid
    if scheme == "exact":
        if law.convention != "lemma":
            raise DomainError("exact scheme needs the lemma index law")
        ew = exact_scheme_weights(params, table)
        c = DiscreteDist(ew.cprime).sample(rng, size)
        j = np.zeros(size, dtype=np.int64)
        for ell in np.unique(c):
            rows = np.flatnonzero(c == ell)
            j[rows] = DiscreteDist(ew.forced[ell]).sample(rng, rows.size)
        width = max(1, int(j.max(initial=0)))
        idx = _draw_distinct(law, rng, j, width)
        valid = np.arange(width)[None, :] < j[:, None]
        return idx, valid
    raise DomainError(f"unknown scheme {scheme!r}")


def _chunks(size: int, m: int):
    step = max(1, _CHUNK_CELLS // max(1, m))
    for lo in range(0, size, step):
        yield min(step, size - lo)


def sample_omega_dprime(params: ModelParams, table: PrimeTable, law: IndexLaw,
                        rng: RngStream | np.random.Generator, size: int | None = None,
                        scheme: Scheme = "iid"):
    """Pathwise draws: sum of B_p(v) over the non-indexed primes plus the block count."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    mu = tilted_probs(params, table)
    n = 1 if size is None else int(size)
    out = np.empty(n, dtype=np.int64)
    pos = 0
    for c in _chunks(n, mu.size):
        idx, valid = _sample_indices(params, table, law, gen, c, scheme)
        b = gen.random((c, mu.size)) < mu
        s, first = _distinct_mask(idx, valid)
        rows = np.arange(c)[:, None]
        hit = np.where(first, b[rows, np.where(first, s, 0)], False)
        out[pos: pos + c] = b.sum(axis=1) - hit.sum(axis=1) + first.sum(axis=1)
        pos += c
    return int(out[0]) if size is None else out


def sample_conditioned(params: ModelParams, table: PrimeTable, law: IndexLaw,
                       rng: RngStream | np.random.Generator, size: int | None = None,
                       scheme: Scheme = "iid"):
    """Draw all B_p(v), force the indexed ones to 1, return the total.

    Consumes randomness exactly like :func:`sample_omega_dprime`, so equal
    streams give equal draws.
    """
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    mu = tilted_probs(params, table)
    n = 1 if size is None else int(size)
    out = np.empty(n, dtype=np.int64)
    pos = 0
    for c in _chunks(n, mu.size):
        idx, valid = _sample_indices(params, table, law, gen, c, scheme)
        b = gen.random((c, mu.size)) < mu
        r, col = np.nonzero(valid)
        b[r, idx[r, col]] = True
        out[pos: pos + c] = b.sum(axis=1)
        pos += c
    return int(out[0]) if size is None else out


def _config_law(probs: list[float]) -> np.ndarray:
    """Law of the sum of independent Bernoullis by listing all 2^m configurations."""
    acc = np.zeros(len(probs) + 1)
    for bits in itertools.product((0, 1), repeat=len(probs)):
        acc[sum(bits)] += math.prod(p if b else 1.0 - p for p, b in zip(probs, bits))
    return acc


def _cprime_by_config(k: int, gamma: float) -> np.ndarray:
    probs = [1.0 / (1.0 + gamma * (ell - 1)) for ell in range(1, k + 1)]
    return _config_law(probs)


def brute_force_omega_dprime(table: PrimeTable, k_n: int, gamma: float, v: float,
                             law: IndexLaw | None = None, scheme: Scheme = "iid",
                             construction: Literal["pathwise", "conditioned"] = "pathwise") -> DiscreteDist:
    """Exact law of a pathwise construction by full enumeration (tiny instances only).

    ``scheme="iid"`` enumerates C' configurations, ordered index tuples under
    ``law`` and Bernoulli configurations of the remaining coordinates
    (``construction="conditioned"`` instead enumerates all coordinates and forces
    the indexed ones to 1). ``scheme="exact"`` enumerates the iterated size-bias
    step by step: a new index j carries weight E[B_j(v)], re-selecting the
    already-forced part carries weight equal to its size; ``law`` is unused.
    """
    m = table.count
    if m > BRUTE_MAX_PRIMES or k_n > BRUTE_MAX_K:
        raise CapacityError(f"brute force limited to {BRUTE_MAX_PRIMES} primes and k_n <= {BRUTE_MAX_K}")
    mu = [v / (float(p) + v - 1.0) for p in table.primes]
    cp = _cprime_by_config(k_n, gamma)
    acc = np.zeros(m + 1)

    def add_forced(weight: float, forced: frozenset):
        if construction == "pathwise":
            rest = _config_law([mu[i] for i in range(m) if i not in forced])
            acc[len(forced): len(forced) + rest.size] += weight * rest
        else:
            for bits in itertools.product((0, 1), repeat=m):
                pr = math.prod(mu[i] if b else 1.0 - mu[i] for i, b in enumerate(bits))
                acc[sum(1 if (b or i in forced) else 0 for i, b in enumerate(bits))] += weight * pr

    if scheme == "iid":
        if law is None:
            raise DomainError("iid scheme needs an index law")
        w = law.weights
        for ell, pc in enumerate(cp):
            if pc == 0:
                continue
            for tup in itertools.product(range(m), repeat=ell):
                add_forced(pc * math.prod(w[i] for i in tup), frozenset(tup))
    elif scheme == "exact":
        for ell, pc in enumerate(cp):
            if pc == 0:
                continue
            paths: dict[frozenset, float] = {frozenset(): 1.0}
            for _ in range(ell):
                nxt: dict[frozenset, float] = {}
                for forced, wt in paths.items():
                    if forced:
                        nxt[forced] = nxt.get(forced, 0.0) + wt * len(forced)
                    for j in range(m):
                        if j not in forced:
                            key = forced | {j}
                            nxt[key] = nxt.get(key, 0.0) + wt * mu[j]
                paths = nxt
            for forced, wt in paths.items():
                add_forced(pc * wt, forced)
    else:
        raise DomainError(f"unknown scheme {scheme!r}")
    return DiscreteDist.from_weights(acc)


def size_bias_coupling_law(params: ModelParams, table: PrimeTable, law: IndexLaw) -> DiscreteDist:
    """Law of sum_{k != I} B_k(v) + 1 with I drawn from ``law``."""
    mu = tilted_probs(params, table)
    parts = [shift(bernoulli_sum(np.delete(mu, i)), 1) for i in range(mu.size)]
    return mixture(law.weights, parts)


def size_biased_tilted(params: ModelParams, table: PrimeTable) -> DiscreteDist:
    return size_bias(dist_omega_tilted(params, table))


def dist_hybrid(A: int, A_prime: int, table: PrimeTable) -> DiscreteDist:
    """Independent sum of Bernoulli(1/p_k), k <= A, and Bernoulli(1/k), k <= A'."""
    return bernoulli_sum(hybrid_probs(A, A_prime, table))


def hybrid_probs(A: int, A_prime: int, table: PrimeTable) -> np.ndarray:
    if A > table.count or A < 0 or A_prime < 0:
        raise DomainError(f"need 0 <= A <= {table.count} and A' >= 0")
    return np.concatenate([1.0 / table.primes[:A].astype(float),
                           1.0 / np.arange(1, A_prime + 1, dtype=float)])


def dist_Q(phi: Callable, gamma: float, eps: float = 1e-14) -> DiscreteDist:
    """Poisson(gamma) penalised by k -> phi(k / gamma)."""
    return penalise(poisson_truncated(gamma, eps), lambda k: phi(np.asarray(k) / gamma))


def mod_poisson_ratio(pgf_value, gamma: float, x):
    """E[x^Z] / E[x^{P_gamma}] = pgf_value / exp(gamma (x - 1))."""
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    return np.asarray(pgf_value) / np.exp(gamma * (np.asarray(x, dtype=float) - 1.0))


def ratio(d: DiscreteDist, gamma: float, xs) -> np.ndarray:
    """Mod-Poisson ratio of a law at speed gamma over a grid of x."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    return np.array([float(mod_poisson_ratio(pgf(d, x), gamma, x)) for x in xs])
