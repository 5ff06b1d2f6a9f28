#!/usr/bin/env python3
"""
Test Special Functions
Checks zeta, its derivatives and the partial sums against mpmath and closed forms
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import mpmath
import numpy as np
import pytest

from backend.errors import DomainError, PreconditionError
from backend.special_functions import (ZetaEvalConfig, gamma_real, partial_zeta, zeta, zeta_deriv2,
                                       zeta_deriv2_complex, zeta_derivative)


def test_zeta_at_two():
    assert zeta(2.0).real == pytest.approx(np.pi ** 2 / 6, rel=1e-12)


def test_zeta_matches_mpmath_on_complex_points():
    for s in [1.5 + 2j, 2.0 - 3.5j, 1.05 + 0.5j, 4.0 + 10j]:
        expected = complex(mpmath.zeta(s))
        assert abs(zeta(s) - expected) <= 1e-10 * abs(expected)


def test_zeta_matches_mpmath_high_on_the_line():
    for s in [1.5 + 50j, 2.0 - 30j, 3.0 + 45j, 1.2 - 20j, 1.1 + 49.5j]:
        expected = complex(mpmath.zeta(s))
        assert abs(zeta(s) - expected) <= 1e-8 * abs(expected)


def test_zeta_near_one_and_far_right():
    assert zeta_deriv2(1.001) * 0.001 ** 3 == pytest.approx(2.0, rel=0.05)
    tail = zeta(20.0).real - 1.0
    assert 0.0 < tail < 2e-6


def test_zeta_deriv2_is_decreasing():
    values = zeta_deriv2(np.linspace(1.01, 30.0, 200))
    assert np.all(values > 0)
    assert np.all(np.diff(values) < 0)


def test_derivatives_match_mpmath():
    for s in [1.5 + 2j, 3.0 - 1j]:
        for k in (1, 2, 3):
            expected = complex(mpmath.zeta(s, derivative=k))
            assert abs(zeta_derivative(s, k) - expected) <= 1e-9 * abs(expected)


def test_zeta_deriv2_real_and_complex_agree():
    sigma = np.array([1.2, 2.0, 5.0])
    real = zeta_deriv2(sigma)
    assert isinstance(real, np.ndarray) and not np.iscomplexobj(real)
    assert np.allclose(real, np.real(zeta_deriv2_complex(sigma + 0j)), rtol=1e-13)
    assert zeta_deriv2(2.0) == pytest.approx(float(mpmath.zeta(2, derivative=2)), rel=1e-10)


def test_array_shape_is_kept():
    grid = np.array([[1.5 + 1j, 2.0], [3.0 - 2j, 1.1]])
    assert zeta(grid).shape == (2, 2)


def test_domain_errors():
    for s in [1.0, 0.5 + 3j, -2.0]:
        with pytest.raises(DomainError):
            zeta(s)
    with pytest.raises(DomainError):
        zeta_deriv2(np.array([2.0 + 1j]))
    with pytest.raises(DomainError):
        zeta(1.05, ZetaEvalConfig(delta=0.1))


def test_config_validation():
    with pytest.raises(PreconditionError):
        ZetaEvalConfig(terms=1)
    with pytest.raises(PreconditionError):
        ZetaEvalConfig(em_order=9)
    with pytest.raises(PreconditionError):
        zeta_derivative(2.0, -1)


def test_partial_zeta_brute_force():
    assert partial_zeta(2.0, 3).real == pytest.approx(1 + 1 / 4 + 1 / 9, abs=1e-14)
    s = 0.3 + 2j
    brute = sum(np.log(n) ** 2 * n ** -s for n in range(1, 11))
    assert abs(partial_zeta(s, 10, k=2) - brute) < 1e-12
    with pytest.raises(PreconditionError):
        partial_zeta(2.0, 0)


def test_partial_zeta_tends_to_zeta():
    gap = zeta(2.0).real - partial_zeta(2.0, 4096).real
    assert 0 < gap <= 1.0 / 4096


def test_gamma_real():
    assert gamma_real(5.0) == pytest.approx(24.0)
    assert gamma_real(0.5) == pytest.approx(np.sqrt(np.pi))
    with pytest.raises(DomainError):
        gamma_real(0.0)


def main():
    print("=" * 60)
    print("SPECIAL FUNCTIONS TEST")
    print("=" * 60)
    print(f"zeta(2)       = {zeta(2.0):.15f}")
    print(f"pi^2/6        = {np.pi ** 2 / 6:.15f}")
    print(f"zeta''(2)     = {zeta_deriv2(2.0):.15f}")
    print(f"zeta(1.5+2i)  = {zeta(1.5 + 2j)}")
    print(f"mpmath        = {complex(mpmath.zeta(1.5 + 2j))}")
    print("=" * 60)


if __name__ == "__main__":
    main()
