#!/usr/bin/env python3
"""
Test Counting
Mean counting function: closed forms, disk roots, strip enumeration, inequalities and heatmaps
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

import config
from backend import counting
from backend.counting import (HEATMAP_COLUMNS, CountingLab, GreenDomain, HeatmapGrid, SearchBox, count_preimages,
                              counting_function, counting_measure, decay_bound_fit, enumerate_preimages, green,
                              heatmap, lindelof_check, littlewood_bound, littlewood_bound_sharp, littlewood_check,
                              mean_counting, mean_counting_exact_disk, nevanlinna_bound_fit, restricted_nevanlinna,
                              subdomain_bound_fit, submean_check, weighted_mean_counting)
from backend.dirichlet_algebra import Character, TruncatedDirichletSeries
from backend.errors import DomainError, MalformedSpec, PreconditionError, RootFinderFailure
from backend.symbols import PERIOD, make_affine, make_constant, make_disk_lift, make_generic, make_sector_lift

AFFINE = make_affine(1.0, 0.25)
LIFT = make_disk_lift([1.0, 0.25, 0.1])


def test_affine_closed_form_matches_disk_roots():
    func = counting_function(AFFINE)
    for w in [1.1, 0.9 + 0.1j, 1.0 - 0.2j, 1.2 + 0.05j]:
        exact = mean_counting_exact_disk(AFFINE, w)
        assert exact.n_roots == 1
        assert func(np.array([w]))[0] == pytest.approx(exact.value, abs=1e-6)
        assert exact.value == pytest.approx(np.log(0.25 / abs(w - 1.0)), abs=1e-12)
    assert func(np.array([1.5 + 0j]))[0] == 0.0


def test_weighted_counting_closed_form():
    w = 1.1 + 0.05j
    expected = np.log(0.25 / abs(w - 1.0)) ** 2 / np.log(2.0)
    assert mean_counting_exact_disk(AFFINE, w, a=1.0).value == pytest.approx(expected, rel=1e-12)
    assert counting_function(AFFINE, a=1.0)(np.array([w]))[0] == pytest.approx(expected, rel=1e-12)


def test_two_roots_of_squared_lift():
    sym = make_disk_lift([1.0, 0.0, 0.25])
    sample = mean_counting_exact_disk(sym, 1.04)
    assert sample.n_roots == 2
    assert sample.value == pytest.approx(2.0 * np.log(1.0 / 0.4), rel=1e-10)
    # same log(r / |w - c|) as the affine case
    assert sample.value == pytest.approx(np.log(0.25 / 0.04), rel=1e-10)
    assert counting_function(sym)(np.array([1.04 + 0j]))[0] == pytest.approx(sample.value, rel=1e-10)


def test_strip_enumeration_matches_disk_roots():
    rng = np.random.default_rng(2)
    drawn = 0.8 * np.sqrt(rng.uniform(0.05, 1.0, 20)) * np.exp(2j * np.pi * rng.uniform(size=20))
    for z0 in [0.5, 0.3 + 0.4j, -0.6j, *drawn]:
        w = complex(LIFT.disk_map(z0))
        exact = mean_counting_exact_disk(LIFT, w)
        assert exact.value == pytest.approx(-np.log(abs(z0)), abs=1e-10)
        strip = mean_counting(LIFT, w)
        assert strip.method == 'strip_enum'
        assert strip.T == pytest.approx(config.COUNTING_T_PERIODS * PERIOD)
        assert abs(strip.value - exact.value) <= max(strip.err_est, 0.02 * exact.value)


def test_weighted_strip_matches_disk_roots():
    z0 = 0.3 + 0.4j
    w = complex(LIFT.disk_map(z0))
    exact = mean_counting_exact_disk(LIFT, w, a=1.0)
    strip = weighted_mean_counting(LIFT, w, 1.0, T=2 * PERIOD)
    # strip enumeration carries (Re s)^2, the exact route rescales log(1/|z|)^2 by 1/log 2
    assert strip.value == pytest.approx(exact.value, rel=0.02)
    with pytest.raises(PreconditionError):
        weighted_mean_counting(LIFT, w, -0.5)


def test_preimage_counts_in_one_period():
    w = complex(LIFT.disk_map(0.5))
    box = SearchBox(0.5, 3.0, -0.5 * PERIOD + 0.3, 0.5 * PERIOD + 0.3)
    assert count_preimages(LIFT, w, box) == 1
    roots = enumerate_preimages(LIFT, w, box)
    assert len(roots) == 1
    assert roots[0][0] == pytest.approx(1.0, abs=1e-9)
    assert roots[0][1] == 1


def test_sector_counting_is_green_function():
    alpha = 2.0
    sym = make_sector_lift(alpha)
    ws = np.array([1.0 + 0.2j, 2.5 - 0.5j, 0.8 + 0.1j, 4.0])
    expected = green(GreenDomain.sector(alpha), ws, 1.5)
    assert np.allclose(counting_function(sym)(ws), expected, rtol=1e-12)
    # outside the sector
    assert counting_function(sym)(np.array([0.6 + 1.0j]))[0] == 0.0


def test_green_function_domains():
    assert green(GreenDomain.disk(), 0.0, 0.5) == pytest.approx(np.log(2.0))
    assert green(GreenDomain.half_plane(0.5), 1.0, 1.5) == pytest.approx(np.log(3.0))
    with pytest.raises(DomainError):
        green(GreenDomain.disk(), 0.3, 0.3)
    with pytest.raises(DomainError):
        green(GreenDomain.half_plane(0.5), 0.2, 1.0)
    with pytest.raises(PreconditionError):
        GreenDomain.sector(0.5)


def test_counting_measure_mass():
    measure = counting_measure(AFFINE)
    assert measure.route == 'pullback'
    assert measure.mass == pytest.approx(np.pi * 0.25 ** 2 / 2.0, rel=1e-6)
    empty = counting_measure(make_constant(1.0))
    assert empty.mass == 0.0 and empty.integrate(np.abs) == 0.0


def test_counting_preconditions():
    with pytest.raises(PreconditionError):
        mean_counting_exact_disk(AFFINE, 1.0)
    with pytest.raises(PreconditionError):
        mean_counting(AFFINE, 0.4)
    with pytest.raises(PreconditionError):
        mean_counting_exact_disk(AFFINE, 1.1, a=-1.0)


def test_inequality_suite_passes():
    ws = [1.1, 1.05 + 0.1j, 0.9 - 0.2j, 1.5, 0.7, 1.2 + 0.1j]
    for sym in (AFFINE, LIFT):
        assert littlewood_check(sym, ws).passed
        assert lindelof_check(sym, 1.0, ws).passed
    assert littlewood_bound(AFFINE, 1.1) == pytest.approx(np.pi * np.log(1.1 / 0.1))
    assert mean_counting_exact_disk(AFFINE, 1.1).value <= littlewood_bound_sharp(AFFINE, 1.1)
    report = submean_check(LIFT, 1.2, 0.1)
    assert report.passed
    assert report.rows[0]['average'] >= report.rows[0]['m_value'] - report.rows[0]['quad_err'] - 1e-12


def test_inequalities_on_random_points():
    rng = np.random.default_rng(17)
    symbols = (AFFINE, LIFT, make_affine(1.2 + 0.3j, 0.5), make_disk_lift([1.5, 0.5, 0.3]))
    for sym in symbols:
        ws = rng.uniform(0.55, 2.5, 50) + 1j * rng.uniform(-1.5, 1.5, 50)
        assert littlewood_check(sym, ws).passed
        assert lindelof_check(sym, 1.0, ws).passed


def test_inequalities_for_sector_and_generic_symbols():
    sector = make_sector_lift(2.0)
    ws = [1.0 + 0.2j, 2.0 - 0.3j, 0.9, 3.0 + 0.5j, 1.2 - 0.4j, 0.6 + 1.0j]
    assert littlewood_check(sector, ws).passed
    lindelof = lindelof_check(sector, 1.0, ws)
    assert lindelof.passed
    assert lindelof.rows[0]['n_roots'] > 0
    generic = make_generic(TruncatedDirichletSeries(np.array([1.0, 0.2, 0.1])))
    near = [1.1 + 0.05j, 0.9 - 0.1j, 1.25]
    report = littlewood_check(generic, near)
    assert report.passed and report.n_checked == 3
    assert lindelof_check(generic, 1.0 + 0.5j, near, T=40.0).passed


def test_sector_subdomain_and_decay_fits():
    sym = make_sector_lift(2.0)
    ws = np.array([1.0 + 0.2j, 1.2 - 0.3j, 2.0 + 0.5j, 2.5 - 0.1j, 3.5 + 0.4j])
    subdomain = subdomain_bound_fit(sym, ws)
    assert subdomain.constant == pytest.approx(1.0, rel=1e-9)
    assert subdomain.stable
    decay = decay_bound_fit(sym, np.array([3.2 + 0.1j, 4.0 - 0.5j, 5.0 + 1.0j]))
    assert decay.constant > 0 and np.isfinite(decay.constant)
    assert decay_bound_fit(AFFINE, ws).constant == 0.0
    with pytest.raises(PreconditionError):
        subdomain_bound_fit(AFFINE, ws)


def test_restricted_nevanlinna_of_identity():
    identity = make_generic(TruncatedDirichletSeries(np.zeros(4)), c0=1)
    assert restricted_nevanlinna(identity, None, 0.8 + 0.3j) == pytest.approx(0.8, abs=1e-9)
    assert restricted_nevanlinna(identity, Character.trivial(2), 0.6 - 0.2j) == pytest.approx(0.6, abs=1e-9)
    fit = nevanlinna_bound_fit(identity, [None], [0.8 + 0j, 0.9 + 0.5j])
    assert fit.constant == pytest.approx(1.25, rel=1e-9)
    assert fit.n_points == 2
    with pytest.raises(PreconditionError):
        restricted_nevanlinna(LIFT, None, 0.8)


def test_restricted_nevanlinna_of_shifted_affine():
    # psi = s + 0.2 + 0.1 2^{-s}; Rouche leaves one root within 0.076 of w - 0.2
    sym = make_generic(TruncatedDirichletSeries(np.array([0.2, 0.1])), c0=1)
    assert restricted_nevanlinna(sym, None, 0.8 + 0.3j) == pytest.approx(0.53250, abs=1e-4)
    twisted = restricted_nevanlinna(sym, Character.from_angles([1.0]), 0.9 - 0.4j)
    assert 0.7 - 0.076 <= twisted <= 0.7 + 0.076
    fit = nevanlinna_bound_fit(sym, [None, Character.from_angles([2.5])], [0.8 + 0.3j, 0.9 - 0.5j])
    assert fit.inconclusive == 0
    assert 0 < fit.constant <= fit.constant_refined
    assert fit.n_points == 4


def test_restricted_nevanlinna_refuses_partial_roots(monkeypatch):
    sym = make_generic(TruncatedDirichletSeries(np.array([0.2, 0.1])), c0=1)
    monkeypatch.setattr(counting, 'enumerate_preimages', lambda *args, **kwargs: [])
    with pytest.raises(RootFinderFailure):
        restricted_nevanlinna(sym, None, 0.8 + 0.3j)
    fit = nevanlinna_bound_fit(sym, [None], [0.8 + 0.3j, 0.9 - 0.5j])
    assert fit.inconclusive == 5
    assert fit.constant == 0.0
    assert not fit.stable


def test_jittered_box_covers_the_original():
    box = SearchBox(1e-9, 1.05, -1.25, 1.25)
    rng = np.random.default_rng(3)
    for _ in range(20):
        wider = box.jittered(rng)
        assert wider.sigma_min < box.sigma_min and wider.sigma_max > box.sigma_max
        assert wider.t_min < box.t_min and wider.t_max > box.t_max


def test_counting_lab_runs_the_suite():
    lab = CountingLab(LIFT)
    ring = lab.ring_points()
    assert len(ring) == 8
    assert np.allclose(np.abs(np.array(ring) - LIFT.a1), 0.25)
    assert lab.sample(1.1).method == 'exact_disk'
    for name in CountingLab.CHECKS:
        assert lab.run_check(name).passed
    summary = lab.summary()
    assert summary['all_passed'] and len(summary['checks']) == 3
    assert [c['name'] for c in summary['checks']] == ['littlewood', 'lindelof', 'submean']
    grid = HeatmapGrid.parse('0.6,1.4,-0.3,0.3,2,2')
    assert list(lab.heatmap(grid).columns) == HEATMAP_COLUMNS
    assert CountingLab(LIFT, 'strip').sample(1.1).method == 'strip_enum'
    with pytest.raises(PreconditionError):
        CountingLab(LIFT, 'newton')
    with pytest.raises(PreconditionError):
        lab.run_check('schwarz')


def test_heatmap_rows():
    frame = heatmap(AFFINE, HeatmapGrid.parse('0.4,1.2,-0.5,0.5,3,2'))
    assert list(frame.columns) == HEATMAP_COLUMNS
    assert len(frame) == 6
    outside = frame[frame['re_w'] < 0.5]
    assert set(outside['method']) == {'outside'}
    assert set(frame[frame['re_w'] > 0.5]['method']) == {'exact_disk'}


def test_heatmap_grid_parse_errors():
    for text in ['1,2,3', '1,2,0,1,0,3', 'a,2,0,1,3,3', '2,1,0,1,3,3']:
        with pytest.raises(MalformedSpec):
            HeatmapGrid.parse(text)


def main():
    print("=" * 60)
    print("COUNTING FUNCTION TEST")
    print("=" * 60)
    for z0 in [0.5, 0.3 + 0.4j]:
        w = complex(LIFT.disk_map(z0))
        exact = mean_counting_exact_disk(LIFT, w)
        strip = mean_counting(LIFT, w, T=2 * PERIOD)
        print(f"w = {w:.6f}: exact {exact.value:.10f}  strip {strip.value:.10f}  (err {strip.err_est:.2e})")
    print(f"affine counting mass: {counting_measure(AFFINE).mass:.10f} vs {np.pi * 0.25 ** 2 / 2:.10f}")
    print("=" * 60)


if __name__ == "__main__":
    main()
