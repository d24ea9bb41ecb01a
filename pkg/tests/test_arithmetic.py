import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from modpoisson.arithmetic import (
    dist_omega_uniform,
    erdos_kac_stat,
    fit_exponential_factor,
    local_limit_report,
    omega_sieve,
    sathe_selberg_fit,
    sathe_selberg_ratio,
    trial_division_omega,
)
from modpoisson.dist import DiscreteDist, pgf, poisson_truncated
from modpoisson.errors import CapacityError, DomainError
from modpoisson.limiting import phi_omega
from modpoisson.primes import sieve


@pytest.fixture(scope="module")
def omega_1e5():
    return omega_sieve(10**5)


def test_omega_examples(omega_1e5):
    om = omega_1e5.omega
    assert om[1] == 0
    assert om[12] == 2
    assert om[30] == 3
    assert om[2 * 3 * 5 * 7 * 11] == 5


def test_omega_matches_trial_division_sample(omega_1e5):
    om = omega_1e5.omega
    for m in list(range(1, 3000)) + list(range(10**5 - 500, 10**5 + 1)):
        assert om[m] == trial_division_omega(m)


def test_trial_division_examples():
    assert [trial_division_omega(m) for m in (1, 2, 4, 6, 97, 360, 510510)] == [0, 1, 1, 2, 1, 3, 7]


def test_omega_invariants(omega_1e5):
    om = omega_1e5.omega.astype(int)
    m = np.arange(2, om.size)
    assert np.all(om[2:] <= np.log2(m))
    assert np.all(om[sieve(10**5).primes] == 1)


@given(st.integers(1, 300), st.integers(1, 300))
def test_omega_additive_on_coprimes(a, b):
    if math.gcd(a, b) == 1:
        om = omega_sieve(a * b).omega
        assert om[a * b] == om[a] + om[b]


def test_omega_total_count():
    n = 10**5
    om = omega_sieve(n).omega
    assert int(om[1:].sum(dtype=np.int64)) == sum(n // int(p) for p in sieve(n).primes)


def test_omega_sieve_errors():
    with pytest.raises(DomainError):
        omega_sieve(0)
    with pytest.raises(CapacityError):
        omega_sieve(10**6, max_n=10**5)
    with pytest.raises(DomainError):
        omega_sieve(1000, table=sieve(100))


def test_dist_omega_uniform_small():
    d = dist_omega_uniform(10)
    assert d.pmf == pytest.approx([0.1, 0.7, 0.2], abs=1e-15)
    assert pgf(dist_omega_uniform(1000), 1.0) == pytest.approx(1.0, abs=1e-15)


def test_histogram_pgf_equals_direct_sum():
    n = 20000
    om = omega_sieve(n).omega[1:]
    d = dist_omega_uniform(n)
    for x in (0.0, 0.5, 1.5, 2.0, 3.0):
        direct = math.fsum(x ** int(w) for w in om) / n
        assert pgf(d, x) == pytest.approx(direct, abs=1e-12)


def test_mean_tracks_mertens():
    # E[omega(U_n)] = log log n + M + O(1/log n)
    for n in (10**4, 10**5, 10**6):
        mean = dist_omega_uniform(n).mean()
        assert abs(mean - math.log(math.log(n)) - 0.2614972128) < 1.5 / math.log(n)


def test_sathe_selberg_ratio_examples():
    assert sathe_selberg_ratio(1000, 1.0) == pytest.approx(1.0, abs=1e-14)
    n = 10**4
    gamma = sieve(n).prime_harmonic
    assert sathe_selberg_ratio(n, 0.0) == pytest.approx(math.exp(gamma) / n, rel=1e-12)
    vals = [sathe_selberg_ratio(10**e, 0.0) for e in (3, 4, 5)]
    assert vals[0] > vals[1] > vals[2]
    with pytest.raises(DomainError):
        sathe_selberg_ratio(2, 0.5)


@given(st.floats(-2.0, 2.0))
def test_fit_recovers_exponential_factor(c):
    xs = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
    ref = np.array([0.1, 0.4, 1.0, 0.8, 0.5])
    assert fit_exponential_factor(xs, ref * np.exp(c * (xs - 1)), ref) == pytest.approx(c, abs=1e-12)


def test_fit_skips_uninformative_points():
    assert fit_exponential_factor([1.0], [1.0], [1.0]) == 0.0
    xs = np.array([0.0, 2.0])
    assert fit_exponential_factor(xs, [0.0, math.e], [0.0, 1.0]) == pytest.approx(1.0)


def test_sathe_selberg_fit_improves_with_n():
    xs = [0.5, 1.5, 2.0]
    a = sathe_selberg_fit(10**4, xs)
    b = sathe_selberg_fit(10**6, xs)
    assert np.all(b.deviation < a.deviation)
    assert np.allclose(a.reference, phi_omega(np.array(xs)))


def test_local_limit_report():
    n = 10**5
    rows = local_limit_report(n)
    L = math.log(math.log(n))
    assert [r.k for r in rows] == list(range(int(2 * L) + 1))
    assert rows[0].p_omega == pytest.approx(1 / n)
    full = dist_omega_uniform(n)
    assert sum(r.p_omega for r in rows) == pytest.approx(float(full.pmf[: len(rows)].sum()), abs=1e-15)
    with pytest.raises(DomainError):
        local_limit_report(999)


def test_erdos_kac_stat_on_gaussian_discretisation():
    g = 400.0
    k = np.arange(0, 1200)
    sd = math.sqrt(g)
    w = stats.norm.cdf((k + 0.5 - g) / sd) - stats.norm.cdf((k - 0.5 - g) / sd)
    ks = erdos_kac_stat(DiscreteDist.from_weights(w), g)
    # floor is the half-jump of a lattice law of spacing 1/sd
    assert ks <= 0.5 * stats.norm.pdf(0) / sd + 1e-3


def test_erdos_kac_stat_point_mass_and_samples():
    # point mass at gamma: the CDF jumps 0 -> 1 where Phi = 1/2
    assert erdos_kac_stat(DiscreteDist.point(4), 4.0) == pytest.approx(0.5)
    rng = np.random.default_rng(0)
    samples = rng.poisson(50.0, 20000)
    assert erdos_kac_stat(samples, 50.0) < erdos_kac_stat(poisson_truncated(3.0, 1e-14), 3.0)
    with pytest.raises(DomainError):
        erdos_kac_stat(samples, 1.0)
