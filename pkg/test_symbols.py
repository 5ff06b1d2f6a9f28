#!/usr/bin/env python3
"""
Test Symbols
Construction, evaluation, class validation and the JSON contract of composition symbols
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
from numpy.polynomial import polynomial as P

import config
from backend.dirichlet_algebra import Character, TruncatedDirichletSeries
from backend.errors import ClassViolation, MalformedSpec, PreconditionError, RangeViolation
from backend.symbols import (LOG2, PERIOD, in_sector, make_affine, make_constant, make_disk_lift, make_generic,
                             make_sector_lift, sector_map, sector_taylor, symbol_from_spec, symbol_to_spec,
                             validate_class)


def sample_points():
    sigma = np.array([1e-3, 0.1, 1.0, 3.0])
    t = np.linspace(-7.0, 7.0, 29)
    return (sigma[:, None] + 1j * t[None, :]).ravel()


def test_affine_evaluation_and_series():
    sym = make_affine(1.0, 0.25)
    s = 0.3 + 1.1j
    assert sym.evaluate(s) == pytest.approx(1.0 + 0.25 * 2 ** -s)
    assert sym.a1 == 1.0
    assert sym.phi.coefficient(2) == pytest.approx(0.25)
    assert np.count_nonzero(sym.phi.coeffs) == 2
    assert sym.label == 'affine(c=1, r=0.25)'


def test_validate_affine_reports_margin():
    report = validate_class(make_affine(1.0, 0.25))
    assert report.valid
    assert report.summary() == 'G0, margin 0.25'
    assert report.to_dict()['class'] == 'G0'


def test_affine_outside_class():
    with pytest.raises(ClassViolation) as info:
        make_affine(0.6, 0.25)
    assert info.value.witness is not None


def test_disk_lift_range_violation():
    with pytest.raises(RangeViolation):
        make_disk_lift([0.6, 0.3])
    sym = make_disk_lift([1.0, 0.25, 0.1])
    assert sym.validated and sym.margin == pytest.approx(0.321875, abs=1e-3)
    assert sym.phi.coefficient(4) == pytest.approx(0.1)


def test_disk_lift_is_periodic():
    sym = make_disk_lift([1.0, 0.25, 0.1])
    s = 0.4 - 0.3j
    assert sym.evaluate(s + 1j * PERIOD) == pytest.approx(sym.evaluate(s))


def test_sector_lift_maps_into_sector():
    sym = make_sector_lift(2.0)
    assert sym.a1 == pytest.approx(1.5)
    values = sym.evaluate(sample_points())
    assert np.all(values.real > 0.5)
    assert np.all(in_sector(values, 2.0))


def test_sector_taylor_matches_closed_form():
    z = 0.3 - 0.2j
    assert P.polyval(z, sector_taylor(2.0, 48)) == pytest.approx(complex(sector_map(z, 2.0)), abs=1e-12)


def test_sector_truncation_stays_in_sector():
    d = make_sector_lift(2.0, K=16).descriptor
    assert 0 < d.poly_rho <= 1.0
    assert d.poly_angle < np.pi / 4 + 1e-6
    with pytest.raises(PreconditionError):
        make_sector_lift(1.0)


def test_sector_series_is_the_certified_polynomial():
    sym = make_sector_lift(2.0)
    d = sym.descriptor
    poly = sector_taylor(2.0, d.K) * d.poly_rho ** np.arange(d.K + 1)
    coeffs = sym.series(4096).coeffs
    powers = 2 ** np.arange(13) - 1
    assert np.allclose(coeffs[powers], poly[:13], rtol=1e-13, atol=1e-15)
    rest = np.delete(coeffs, powers)
    assert np.all(rest == 0)
    assert np.array_equal(sym.series(256).coeffs, coeffs[:256])
    assert sym.a1 == pytest.approx(1.5)


def test_truncated_lift_shares_the_series():
    sym = make_sector_lift(2.0)
    lift = sym.truncated_lift()
    assert np.allclose(lift.disk_coeffs(), sym.sector_polynomial())
    assert np.array_equal(lift.phi.coeffs, sym.phi.coeffs)
    assert lift.a1 == pytest.approx(sym.a1)
    opening = np.max(np.abs(np.angle(lift.boundary_image(config.BOUNDARY_SAMPLES) - 0.5)))
    assert opening < np.pi / 4 + 1e-6
    with pytest.raises(PreconditionError):
        make_affine(1.0, 0.25).truncated_lift()


def test_affine_matches_linear_disk_lift():
    for c, r in [(1.0, 0.25), (2.0 + 1j, -0.7)]:
        affine = make_affine(c, r)
        lift = make_disk_lift([c, r])
        assert np.array_equal(affine.phi.coeffs, lift.phi.coeffs)
        s = 0.3 + 1.7j
        assert affine.evaluate(s) == pytest.approx(lift.evaluate(s))


def test_translation_and_twist_of_disk_lifts():
    sym = make_affine(1.0 + 0.5j, 0.3)
    tau = 0.7
    s = 0.2 + 0.1j
    assert sym.translate(tau).evaluate(s) == pytest.approx(sym.evaluate(s + 1j * tau))
    chi = Character.from_angles([1.1, 0.4])
    assert sym.twisted(chi).evaluate(s) == pytest.approx(sym.evaluate(s, chi))
    assert sym.evaluate(s, chi) == pytest.approx(1.0 + 0.5j + 0.3 * np.exp(1.1j) * np.exp(-LOG2 * s))


def test_generic_symbol_validation():
    phi = TruncatedDirichletSeries(np.array([1.0, 0.2, 0.1, 0.05]))
    sym = make_generic(phi)
    assert sym.validated
    # inf Re phi = 0.75 since chi(4) = chi(2)^2
    assert 0.25 - 1e-9 <= sym.margin < 0.5
    with pytest.raises(ClassViolation):
        make_generic(TruncatedDirichletSeries(np.array([0.6, 0.5])))


def test_generic_twist_uses_characters():
    phi = TruncatedDirichletSeries(np.array([1.0, 0.2, 0.1]))
    sym = make_generic(phi)
    chi = Character.from_angles([0.5, 2.0])
    s = 0.5 + 0.5j
    expected = 1.0 + 0.2 * np.exp(0.5j) * 2 ** -s + 0.1 * np.exp(2.0j) * 3 ** -s
    assert sym.evaluate(s, chi) == pytest.approx(expected)


def test_constant_symbol():
    sym = make_constant(1.0)
    assert sym.is_constant
    assert sym.evaluate(0.3 + 2j) == pytest.approx(1.0)


def test_cross_section_of_affine_disk():
    sym = make_affine(1.0, 0.25)
    lo, hi = sym.cross_section(np.array([1.0, 1.2, 2.0]))
    assert lo[0] == pytest.approx(-0.25) and hi[0] == pytest.approx(0.25)
    assert hi[1] == pytest.approx(np.sqrt(0.25 ** 2 - 0.2 ** 2))
    assert np.isnan(lo[2]) and np.isnan(hi[2])


def test_spec_roundtrip():
    for sym in (make_affine(1.0, 0.25), make_disk_lift([1.0, 0.25, 0.1]), make_sector_lift(3.0, K=8)):
        again = symbol_from_spec(symbol_to_spec(sym))
        assert again.label == sym.label
        assert again.phi.allclose(sym.phi, atol=1e-12)
    inline = symbol_from_spec({'c0': 0, 'descriptor': {'kind': 'affine', 'c': [1.0, 0.0], 'r': '0.25'}})
    assert inline.evaluate(1.0) == pytest.approx(1.125)


def test_malformed_specs():
    for bad in ({'descriptor': {'kind': 'hyperbolic'}},
                {'descriptor': {'kind': 'sector_lift'}},
                {'descriptor': {'kind': 'generic'}},
                {'c0': 'two', 'descriptor': {'kind': 'affine', 'c': 1.0}},
                [1, 2, 3]):
        with pytest.raises(MalformedSpec):
            symbol_from_spec(bad)


def main():
    print("=" * 60)
    print("SYMBOLS TEST")
    print("=" * 60)
    for sym in (make_affine(1.0, 0.25), make_disk_lift([1.0, 0.25, 0.1]), make_sector_lift(2.0)):
        print(f"{sym.label:32s} {validate_class(sym).summary()}")
    print("=" * 60)


if __name__ == "__main__":
    main()
