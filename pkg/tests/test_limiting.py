import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modpoisson.errors import DomainError
from modpoisson.limiting import (
    EULER_GAMMA,
    LimitFunctionSpec,
    evaluate,
    phi_C_closed,
    phi_C_trunc,
    phi_generic,
    phi_Omega,
    phi_Omega_trunc,
    phi_omega,
    prime_cutoff,
)
from modpoisson.primes import PrimeTable, sieve

MERTENS = 0.2614972128476427837554268386


def product_loop(k, x):
    out = 1.0
    for ell in range(1, k + 1):
        out *= (1 + (x - 1) / ell) * math.exp(-(x - 1) / ell)
    return out


def test_euler_gamma_constant():
    assert EULER_GAMMA == pytest.approx(0.5772156649015329, abs=1e-16)


@pytest.mark.parametrize("k", [1, 2, 10, 1000, 5000])
def test_phi_C_trunc_trivial_points(k):
    assert phi_C_trunc(k, 1.0) == 1.0
    assert phi_C_trunc(k, 0.0) == 0.0


@given(st.floats(0.0, 10.0))
def test_phi_C_trunc_one_term(x):
    assert phi_C_trunc(1, x) == pytest.approx(x * math.exp(1 - x), rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("k", [3, 50, 1001, 4000])
@pytest.mark.parametrize("x", [0.3, 1.7, 4.5])
def test_phi_C_trunc_matches_loop(k, x):
    # k > 1000 goes through the log-space branch
    assert phi_C_trunc(k, x) == pytest.approx(product_loop(k, x), rel=1e-11)


@given(st.integers(1, 3000), st.floats(0.0, 10.0))
def test_phi_C_trunc_in_unit_interval(k, x):
    assert 0.0 <= phi_C_trunc(k, x) <= 1.0


def test_phi_C_trunc_vectorised():
    xs = np.linspace(0, 5, 11)
    assert np.allclose(phi_C_trunc(40, xs), [product_loop(40, x) for x in xs], rtol=1e-13)


def test_phi_C_closed_values():
    assert phi_C_closed(1.0) == pytest.approx(1.0, abs=1e-15)
    assert phi_C_closed(2.0) == pytest.approx(math.exp(-EULER_GAMMA), rel=1e-14)
    assert phi_C_closed(2.0) == pytest.approx(0.5615, abs=1e-4)
    assert phi_C_closed(0.0) == 0.0
    for x in (0.5, 3.5, 7.25):
        assert phi_C_closed(x) == pytest.approx(math.exp(-(x - 1) * EULER_GAMMA) / math.gamma(x), rel=1e-13)
    with pytest.raises(DomainError):
        phi_C_closed(-0.1)


def test_truncated_product_converges_to_gamma_form():
    xs = np.linspace(0, 4, 41)
    gaps = [np.max(np.abs(phi_C_trunc(k, xs) - phi_C_closed(xs))) for k in (10, 100, 1000, 10**5)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4


def test_phi_Omega_trunc_examples():
    t = sieve(1000)
    assert phi_Omega_trunc(t, 1.0) == 1.0
    for x in (0.0, 0.5, 2.0, 5.0):
        assert phi_Omega_trunc([2], x) == pytest.approx((1 + (x - 1) / 2) * math.exp(-(x - 1) / 2), rel=1e-15)
    prev = phi_Omega_trunc(t.restrict(10), 2.5)
    for lim in (100, 1000):
        cur = phi_Omega_trunc(t.restrict(lim), 2.5)
        assert cur < prev
        prev = cur


def test_phi_Omega_at_zero_is_mertens_constant():
    # prod (1 - 1/p) e^{1/p} = e^{M - gamma} by Mertens' theorems
    assert phi_Omega(0.0) == pytest.approx(math.exp(MERTENS - EULER_GAMMA), abs=1e-9)


def test_phi_Omega_matches_long_truncation():
    t = sieve(10**7)
    for x in (0.5, 2.0, 3.0):
        assert phi_Omega(x) == pytest.approx(phi_Omega_trunc(t, x), abs=5e-8)


def test_phi_omega_examples():
    assert phi_omega(1.0) == pytest.approx(1.0, abs=1e-14)
    assert phi_omega(0.0) == 0.0
    v = phi_omega(2.0, 1e-6)
    assert 0 <= v <= 1
    assert v == pytest.approx(phi_omega(2.0, 1e-12), abs=2e-6)
    assert phi_omega(2.0) == pytest.approx(phi_C_closed(2.0) * phi_Omega(2.0), rel=1e-15)


def test_prime_cutoff_grows_with_accuracy():
    assert prime_cutoff(2.0, 1e-6) <= prime_cutoff(2.0, 1e-10)
    assert prime_cutoff(4.0, 1e-8) >= prime_cutoff(2.0, 1e-8)


def test_phi_generic_examples():
    assert phi_generic([], 3.0) == 1.0
    for x in (0.0, 0.7, 2.0):
        assert phi_generic([0.5], x) == pytest.approx((1 + (x - 1) / 2) * math.exp(-(x - 1) / 2), rel=1e-15)
    primes = sieve(200).primes
    assert phi_generic(1.0 / primes, 1.8) == pytest.approx(phi_Omega_trunc(primes, 1.8), rel=1e-13)


@given(st.lists(st.floats(0.0, 1.0), max_size=30), st.floats(0.0, 20.0))
def test_phi_generic_in_unit_interval(ps, x):
    assert 0.0 <= phi_generic(ps, x) <= 1.0 + 1e-15


def test_limit_function_spec():
    assert evaluate(LimitFunctionSpec("C"), 2.0) == phi_C_closed(2.0)
    assert evaluate(LimitFunctionSpec("C", truncation=5, closed_form=False), 2.0) == phi_C_trunc(5, 2.0)
    assert evaluate(LimitFunctionSpec("omega"), 1.5) == phi_omega(1.5)
    assert evaluate(LimitFunctionSpec("Omega"), 1.5) == phi_Omega(1.5)
    assert evaluate(LimitFunctionSpec("generic", probs=(0.5,)), 3.0) == phi_generic([0.5], 3.0)
    with pytest.raises(DomainError):
        LimitFunctionSpec("C", truncation=0)
    with pytest.raises(DomainError):
        LimitFunctionSpec("C", error_target=0)
    with pytest.raises(DomainError):
        LimitFunctionSpec("generic")
