#!/usr/bin/env python3
"""
Test Dirichlet Algebra
Convolution, exp/log, divisor functions, characters and twists on truncated series
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import math

import numpy as np
import pytest

from backend.dirichlet_algebra import (Character, TruncatedDirichletSeries, bergman_norm_sq, convolve, derivative,
                                       divisor_alpha, dm_norm_sq, evaluate, exp_series, first_primes,
                                       from_mapping, identity_series, log_series, monomial, prime_exponent_matrix,
                                       twist, vertical_shift, zeta_series)
from backend.errors import InsufficientPrimes, MalformedSpec, PreconditionError

N = 256


def mobius_sieve(size):
    mu = np.ones(size + 1, dtype=int)
    is_prime = np.ones(size + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, size + 1):
        if is_prime[p]:
            is_prime[2 * p::p] = False
            mu[p::p] *= -1
            mu[p * p::p * p] = 0
    return mu[1:]


def divisor_count_sieve(size):
    counts = np.zeros(size + 1, dtype=int)
    for d in range(1, size + 1):
        counts[d::d] += 1
    return counts[1:]


def random_series(seed, size=N, first=0.0):
    rng = np.random.default_rng(seed)
    n = np.arange(1, size + 1)
    coeffs = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * 0.3 / n
    coeffs[0] = first
    return TruncatedDirichletSeries(coeffs)


def test_exp_log_roundtrip():
    f = random_series(1)
    back = log_series(exp_series(f))
    assert np.max(np.abs(back.coeffs - f.coeffs)) <= 1e-10
    g = exp_series(log_series(random_series(2, first=1.0)))
    assert g.allclose(random_series(2, first=1.0), atol=1e-10)


def test_mobius_convolution_is_exact():
    mu = TruncatedDirichletSeries(mobius_sieve(N).astype(complex))
    product = convolve(zeta_series(N), mu)
    assert np.array_equal(product.coeffs, identity_series(N).coeffs)


def test_divisor_alpha_two_is_divisor_count():
    d2 = divisor_alpha(2.0, N)
    assert np.allclose(d2.coeffs.real, divisor_count_sieve(N), rtol=0, atol=1e-9)
    assert np.all(d2.coeffs.imag == 0)
    assert np.allclose(divisor_alpha(1.0, N).coeffs, 1.0, atol=1e-12)


def test_monomial_products():
    product = monomial(2, 12) * monomial(3, 12)
    assert product.allclose(monomial(6, 12))
    assert (monomial(5, 12) * monomial(3, 12)).allclose(TruncatedDirichletSeries(np.zeros(12)))


def test_exp_of_scaled_prime_power():
    size = 64
    f = monomial(2, size, 0.7)
    g = exp_series(f)
    for k in range(7):
        assert g.coefficient(2 ** k) == pytest.approx(0.7 ** k / math.factorial(k), abs=1e-13)
    assert g.coefficient(3) == 0


def test_exp_log_preconditions():
    with pytest.raises(PreconditionError):
        exp_series(identity_series(8))
    with pytest.raises(PreconditionError):
        log_series(monomial(2, 8))


def test_evaluate_and_derivative():
    f = from_mapping({1: 1.0, 2: 0.5, 3: -1.0}, 8)
    s = 1.3 - 0.4j
    direct = 1.0 + 0.5 * 2 ** -s - 3 ** -s
    assert abs(evaluate(f, s) - direct) < 1e-14
    h = 1e-6
    numeric = (evaluate(f, s + h) - evaluate(f, s - h)) / (2 * h)
    assert abs(evaluate(derivative(f), s) - numeric) < 1e-8
    assert evaluate(monomial(2, 4), 1.0) == pytest.approx(0.5)


def test_vertical_shift():
    f = random_series(3, size=32, first=1.0)
    s = 0.8 + 0.2j
    assert abs(evaluate(vertical_shift(f, 2.5), s) - evaluate(f, s + 2.5j)) < 1e-12


def test_norms():
    e1 = identity_series(16)
    assert dm_norm_sq(e1, 2.0) == 0.0
    assert bergman_norm_sq(e1, 2.0) == pytest.approx(1.0)
    f = monomial(6, 16, 2.0)
    assert dm_norm_sq(f, 2.0) == pytest.approx(4.0 / np.log(6) ** 2)
    assert bergman_norm_sq(f, 2.0) == pytest.approx(4.0 / 4.0)
    assert f.h2_norm() == pytest.approx(2.0)


def test_character_is_completely_multiplicative():
    rng = np.random.default_rng(7)
    chi = Character.from_angles(rng.uniform(0, 2 * np.pi, 10))
    assert chi(6) == pytest.approx(chi(2) * chi(3))
    assert chi(8) == pytest.approx(chi(2) ** 3)
    table = chi.table(29)
    assert np.allclose(np.abs(table), 1.0)
    assert table[0] == 1.0


def test_twist():
    chi = Character.from_angles([np.pi / 3, np.pi / 5])
    f = from_mapping({1: 1.0, 2: 1.0, 6: 2.0}, 6)
    g = twist(f, chi)
    assert g.coefficient(2) == pytest.approx(np.exp(1j * np.pi / 3))
    assert g.coefficient(6) == pytest.approx(2.0 * np.exp(1j * (np.pi / 3 + np.pi / 5)))
    with pytest.raises(InsufficientPrimes):
        twist(from_mapping({5: 1.0}, 5), chi)


def test_primes_and_exponents():
    assert first_primes(5) == (2, 3, 5, 7, 11)
    exponents = prime_exponent_matrix(12, 3)
    assert list(exponents[11]) == [2, 1, 0]
    with pytest.raises(InsufficientPrimes):
        prime_exponent_matrix(10, 2)


def test_serialization_contract():
    f = random_series(4, size=8, first=1.0)
    payload = f.to_dict()
    assert set(payload) == {'N', 're', 'im'}
    assert TruncatedDirichletSeries.from_dict(payload).allclose(f, atol=0)
    with pytest.raises(MalformedSpec):
        TruncatedDirichletSeries.from_dict({'N': 3, 're': [1.0, 2.0]})


def main():
    print("=" * 60)
    print("DIRICHLET ALGEBRA TEST")
    print("=" * 60)
    f = random_series(1)
    err = np.max(np.abs(log_series(exp_series(f)).coeffs - f.coeffs))
    print(f"exp/log roundtrip error (N={N}): {err:.3e}")
    d2 = divisor_alpha(2.0, N).coeffs.real
    print(f"max |d_2 - divisor count|: {np.max(np.abs(d2 - divisor_count_sieve(N))):.3e}")
    print("=" * 60)


if __name__ == "__main__":
    main()
