#!/usr/bin/env python3
"""
Test Criteria
Refinement verdicts, Schatten-class integrals, Carleson boxes and embedding inequalities
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

import config
from backend.criteria import (BOX_COLUMNS, DIVERGENT, FINITE, INCONCLUSIVE, CarlesonMeasure, CriterionReport,
                              aligned_boxes, bergman_criterion, carleson_box_constant, carleson_schur_demo,
                              density_measure, embedding_check, luecking_zhu, multi_integral_s2m,
                              schatten_carleson_probe, schur_measure, schur_points, sector_decay_fit,
                              sector_scaling_probe, verdict_from_trace, weighted_carleson_criterion)
from backend.dirichlet_algebra import from_mapping, identity_series, monomial
from backend.errors import PreconditionError
from backend.operator_lab import build_matrix, frobenius_norm_sq, toeplitz_matrix
from backend.special_functions import partial_zeta
from backend.symbols import make_affine, make_sector_lift

AFFINE = make_affine(1.0, 0.25)


def test_verdicts():
    assert verdict_from_trace([1.0, 1.1, 1.12, 1.125, 1.126]) == FINITE
    assert verdict_from_trace([1.0, 2.0, 4.0, 8.0]) == DIVERGENT
    assert verdict_from_trace([0.0, 0.0, 0.0]) == FINITE
    assert verdict_from_trace([1.0, float('inf')]) == DIVERGENT
    assert verdict_from_trace([1.0, float('nan'), 1.0]) == INCONCLUSIVE
    assert verdict_from_trace([1.0, 0.5, 1.2]) == INCONCLUSIVE
    with pytest.raises(PreconditionError):
        verdict_from_trace([])
    with pytest.raises(PreconditionError):
        CriterionReport('empty', 0.0, [], FINITE)


def test_sector_scaling_threshold():
    above = sector_scaling_probe(3.0, 1.5, config.DELTA_LADDER)
    assert above.verdict == FINITE
    assert above.details['threshold'] == pytest.approx(0.5)
    below = sector_scaling_probe(2.0, 0.9, config.DELTA_LADDER)
    assert below.verdict == DIVERGENT
    assert below.refinement_trace[-1] >= config.DIVERGENT_GROWTH * below.refinement_trace[0]
    with pytest.raises(PreconditionError):
        sector_scaling_probe(1.0, 2.0, config.DELTA_LADDER)


def test_sector_decay_exponent():
    fit = sector_decay_fit(make_sector_lift(2.0))
    assert 1.9 <= fit.exponent <= 2.1
    assert fit.r_squared > 0.99
    assert len(fit.slopes) == 3


def test_luecking_zhu_on_sector():
    report = luecking_zhu(make_sector_lift(2.0), 1.5)
    assert report.verdict == FINITE
    assert report.value > 0
    assert len(report.refinement_trace) == len(config.DELTA_LADDER)


def test_criteria_on_affine_symbol():
    # the image stays away from Re w = 1/2, so every trace settles at once
    assert luecking_zhu(AFFINE, 1.0).verdict == FINITE
    necessary, sufficient = weighted_carleson_criterion(AFFINE, 2.0, 2.0)
    assert necessary.verdict == FINITE and sufficient.verdict == FINITE
    assert necessary.value <= sufficient.value
    assert bergman_criterion(AFFINE, 4.0, 1.0).verdict == FINITE
    assert schatten_carleson_probe(AFFINE, 2.0, 2.0).verdict == FINITE


def test_criteria_preconditions():
    with pytest.raises(PreconditionError):
        bergman_criterion(AFFINE, 2.0, 0.0)
    with pytest.raises(PreconditionError):
        weighted_carleson_criterion(AFFINE, 2.0, 1.0)
    with pytest.raises(PreconditionError):
        luecking_zhu(AFFINE, 1.0, deltas=[0.1, 0.2])
    with pytest.raises(PreconditionError):
        multi_integral_s2m(AFFINE, 3)


def test_s2m_single_integral_matches_hilbert_schmidt():
    report = multi_integral_s2m(AFFINE, 1, n_cutoff=64)
    frobenius = frobenius_norm_sq(build_matrix(AFFINE, 64, 1024))
    expected = frobenius - partial_zeta(2.0 * AFFINE.a1.real, 64).real
    assert report.value == pytest.approx(expected, rel=1e-3)
    assert report.verdict == FINITE


def test_s2m_double_integral_matches_toeplitz():
    entries = toeplitz_matrix(AFFINE, 48).entries
    expected = (2.0 / np.pi) ** 2 * float(np.sum(np.abs(entries) ** 2))
    report = multi_integral_s2m(AFFINE, 2, n_samples=40000, n_batches=20, n_cutoff=48)
    assert report.value == pytest.approx(expected, rel=0.1)
    assert report.details['stderr'] > 0
    again = multi_integral_s2m(AFFINE, 2, n_samples=40000, n_batches=20, n_cutoff=48)
    assert again.value == report.value


def test_schur_demo():
    demo = carleson_schur_demo(30)
    assert np.allclose(np.abs(np.diag(demo.matrix)), 1.0, rtol=0, atol=1e-12)
    assert demo.b <= config.SCHUR_RATIO_BOUND
    assert np.isfinite(demo.decay_constant)
    larger = carleson_schur_demo(40)
    assert larger.sup == pytest.approx(demo.sup, rel=0.01)
    assert list(demo.to_frame().columns) == ['n', 'row_sum']
    with pytest.raises(PreconditionError):
        carleson_schur_demo(41)


def test_aligned_boxes_give_one_half():
    measure = schur_measure(20)
    report = carleson_box_constant(measure, boxes=aligned_boxes(schur_points(20)))
    assert list(report.table.columns) == BOX_COLUMNS
    aligned = report.table[report.table['kind'] == 'aligned']
    assert len(aligned) == 20
    assert np.all(aligned['ratio'] == 0.5)
    assert report.constant >= 0.5


def test_density_measure_box_constant():
    measure = density_measure(lambda w: np.real(w) - 0.5, 1.0, -1.0, 1.0)
    assert measure.mass(1.5, -1.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    report = carleson_box_constant(measure)
    assert report.constant == pytest.approx(0.5, abs=1e-12)


def test_carleson_measure_contract():
    measure = CarlesonMeasure([1.0 + 0j, 1.0 + 1j], [1.0, 2.0])
    assert measure.mass(2.0, 0.0, 1.0) == 1.0
    assert measure.mass(2.0, 0.0, 1.0 + 1e-9) == 3.0
    assert carleson_box_constant(CarlesonMeasure.empty()).constant == 0.0
    with pytest.raises(PreconditionError):
        CarlesonMeasure([0.4 + 0j], [1.0])


def test_embeddings():
    one = embedding_check(identity_series(4)).set_index('embedding')
    assert one.loc['local', 'ratio'] == pytest.approx(1.0, rel=1e-12)
    two = embedding_check(monomial(2, 2)).set_index('embedding')
    assert two.loc['local', 'ratio'] == pytest.approx(0.5, rel=1e-12)
    mixed = embedding_check(from_mapping({1: 1.0, 2: 0.5, 3: -0.25j, 5: 0.1}, 5))
    assert list(mixed['embedding']) == ['local', 'bergman_dm2', 'derivative_a2']
    for frame in (one, two, mixed):
        assert frame['passed'].all()


def main():
    print("=" * 60)
    print("CRITERIA TEST")
    print("=" * 60)
    for alpha, p in [(3.0, 1.5), (2.0, 0.9)]:
        report = sector_scaling_probe(alpha, p, config.DELTA_LADDER)
        print(f"sector alpha={alpha} p={p}: {report.verdict}  trace {report.refinement_trace}")
    print(f"decay exponent (alpha=2): {sector_decay_fit(make_sector_lift(2.0)).exponent:.4f}")
    demo = carleson_schur_demo(30)
    print(f"Schur sup row sum (n=30): {demo.sup:.6f}, b = {demo.b:.4f}")
    print("=" * 60)


if __name__ == "__main__":
    main()
