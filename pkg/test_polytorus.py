#!/usr/bin/env python3
"""
Test Polytorus
Monte Carlo over random characters: boundary values, boundary Schatten sums and H^p norms
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

from backend.criteria import FINITE
from backend.dirichlet_algebra import TruncatedDirichletSeries, from_mapping, identity_series, monomial
from backend.errors import PreconditionError
from backend.operator_lab import build_matrix, frobenius_norm_sq
from backend.polytorus import (McConfig, boundary_uniformity_test, boundary_value, boundary_values,
                               hp_ratio_check, hp_norm_mc, mc_schatten_boundary, sample_character,
                               sample_characters)
from backend.symbols import make_affine, make_constant, make_disk_lift, make_generic

CFG = McConfig(J=8, n_samples=20000, n_batches=20, seed=7)
FULL = McConfig(J=8, n_samples=100000, seed=7)
AFFINE = make_affine(1.0, 0.25)


def test_config_validation():
    with pytest.raises(PreconditionError):
        McConfig(sigma_bv=0.2)
    with pytest.raises(PreconditionError):
        McConfig(n_batches=1)
    with pytest.raises(PreconditionError):
        McConfig(J=0)
    with pytest.raises(PreconditionError):
        McConfig(n_samples=10, n_batches=20)


def test_sampled_characters():
    rng = np.random.default_rng(3)
    chi = sample_character(CFG, rng)
    assert chi.J == CFG.J
    assert chi(6) == pytest.approx(chi(2) * chi(3))
    angles = sample_characters(CFG, rng, 20000)
    assert angles.shape == (20000, CFG.J)
    assert abs(np.mean(np.exp(1j * angles[:, 0]))) < 0.03


def test_boundary_values_of_disk_lifts():
    rng = np.random.default_rng(11)
    angles = sample_characters(CFG, rng, 500)
    assert np.allclose(boundary_values(make_constant(1.0), angles, CFG), 1.0)
    exact = 1.0 + 0.25 * np.exp(1j * angles[:, 0])
    assert np.allclose(boundary_values(AFFINE, angles, CFG), exact, atol=1e-6)
    chi = sample_character(CFG, rng)
    assert boundary_value(AFFINE, chi, CFG) == pytest.approx(1.0 + 0.25 * chi(2), abs=1e-6)


def test_boundary_values_stay_in_half_plane():
    rng = np.random.default_rng(5)
    angles = sample_characters(CFG, rng, 10000)
    generic = make_generic(TruncatedDirichletSeries(np.array([1.0, 0.2, 0.1])))
    for sym in (AFFINE, make_disk_lift([1.0, 0.25, 0.1]), generic):
        assert boundary_values(sym, angles, CFG).real.min() > 0.5


def test_hp_norms():
    two = hp_norm_mc(from_mapping({1: 1.0, 2: 1.0}, 2), 2.0, FULL)
    assert abs(two.estimate - np.sqrt(2.0)) <= 3.0 * two.stderr
    four = hp_norm_mc(from_mapping({1: 1.0, 2: 1.0}, 2), 4.0, CFG)
    assert abs(four.estimate - 6.0 ** 0.25) <= 4.0 * four.stderr
    assert hp_norm_mc(identity_series(4), 3.0, CFG).estimate == pytest.approx(1.0)
    assert hp_norm_mc(monomial(2, 2), 1.0, CFG).estimate == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        hp_norm_mc(monomial(2, 2), 0.0, CFG)


def test_boundary_trace_matches_frobenius():
    estimate = mc_schatten_boundary(AFFINE, 1, FULL, n_cutoff=64, assume_compact=True)
    expected = frobenius_norm_sq(build_matrix(AFFINE, 64, 1024))
    assert estimate.stderr > 0
    assert abs(estimate.estimate - expected) <= 3.0 * estimate.stderr
    assert estimate.verdict == FINITE
    assert estimate.n_samples == FULL.n_samples


def test_boundary_estimates_are_translation_invariant():
    base = mc_schatten_boundary(AFFINE, 1, CFG, n_cutoff=64, assume_compact=True)
    moved = mc_schatten_boundary(AFFINE.translate(0.7), 1, CFG, n_cutoff=64, assume_compact=True)
    assert abs(base.estimate - moved.estimate) <= 6.0 * max(base.stderr, moved.stderr)


def test_second_boundary_moment():
    estimate = mc_schatten_boundary(AFFINE, 2, CFG, assume_compact=True)
    assert np.isfinite(estimate.estimate) and estimate.estimate > 0
    assert estimate.details['m'] == 2
    with pytest.raises(PreconditionError):
        mc_schatten_boundary(AFFINE, 3, CFG)


def test_non_compact_symbol_has_no_verdict():
    estimate = mc_schatten_boundary(make_affine(0.75, 0.25), 1, CFG, n_cutoff=16)
    assert estimate.verdict is None
    assert estimate.details['compact'] is False


def test_uniformity_of_affine_boundary():
    result = boundary_uniformity_test(AFFINE, CFG)
    assert result['passed']
    assert result['n_samples'] == CFG.n_samples
    with pytest.raises(PreconditionError):
        boundary_uniformity_test(make_constant(1.0), CFG)


def test_hp_ratio_check_is_experimental():
    cfg = McConfig(J=32, n_samples=4000, n_batches=10)
    result = hp_ratio_check(AFFINE, 2.0, cfg, n_polys=2, length=8, n_trunc=64)
    assert result['experimental']
    assert len(result['ratios']) == 2
    assert all(r > 0 for r in result['ratios'])


def main():
    print("=" * 60)
    print("POLYTORUS MONTE CARLO TEST")
    print("=" * 60)
    estimate = mc_schatten_boundary(AFFINE, 1, CFG, n_cutoff=64, assume_compact=True)
    print(f"boundary S_2 (n <= 64): {estimate.estimate:.8f} +- {estimate.stderr:.2e}")
    print(f"matrix Frobenius^2    : {frobenius_norm_sq(build_matrix(AFFINE, 64, 1024)):.8f}")
    norm = hp_norm_mc(from_mapping({1: 1.0, 2: 1.0}, 2), 2.0, CFG)
    print(f"||1 + 2^-s||_2 ~ {norm.estimate:.6f} +- {norm.stderr:.2e} (sqrt 2 = {np.sqrt(2):.6f})")
    print(f"KS uniformity: {boundary_uniformity_test(AFFINE, CFG)}")
    print("=" * 60)


if __name__ == "__main__":
    main()
