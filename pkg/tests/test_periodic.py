import math
from fractions import Fraction

import numpy as np
import pytest

from apspec.errors import IncommensurableSpectrum, NonConvergence, NotNonnegative
from apspec.frequency import ExactFrequency
from apspec.periodic import (
    LaurentForm,
    commensurable_base,
    fejer_riesz,
    polynomial_roots,
)
from apspec.trigpoly import TrigPoly, modulus_squared, multiply, spectrum

EF = ExactFrequency


def test_commensurable_base_cosine():
    f = TrigPoly.from_cos([(1, 2.0)], constant=2.0)
    lf = commensurable_base(f)
    assert lf.base == EF(1)
    assert lf.coeffs.tolist() == [1.0, 2.0, 1.0]
    assert lf.n == 1
    assert lf.to_trigpoly() == f


def test_commensurable_base_radical_ray():
    # frequencies {-sqrt(2), 0, sqrt(2)/2} -> base sqrt(2)/2, N = 2
    f = TrigPoly([(EF(0), 1.0), (-EF.sqrt_of(2), 0.5), (EF.sqrt_of(2) / 2, 2.0)])
    lf = commensurable_base(f)
    assert lf.base == EF.sqrt_of(2) / 2
    assert lf.n == 2
    assert lf.coeffs.tolist() == [0.5, 0.0, 1.0, 2.0, 0.0]


def test_commensurable_base_rejects_independent():
    f = TrigPoly([(EF(1), 1.0), (EF.sqrt_of(2), 1.0)])
    with pytest.raises(IncommensurableSpectrum):
        commensurable_base(f)


def test_commensurable_base_constant():
    lf = commensurable_base(TrigPoly.constant(3.0))
    assert lf.n == 0
    assert lf.coeffs.tolist() == [3.0]


def test_polynomial_roots_quadratics():
    roots = polynomial_roots(np.array([-1.0, 0.0, 1.0]))  # w^2 - 1
    vals = sorted(r.real for r, m in roots)
    assert len(roots) == 2
    assert vals == pytest.approx([-1.0, 1.0], abs=1e-12)
    roots = polynomial_roots(np.array([1.0, 0.0, 1.0]))  # w^2 + 1
    ims = sorted(r.imag for r, m in roots)
    assert ims == pytest.approx([-1.0, 1.0], abs=1e-12)


def test_polynomial_roots_multiplicity():
    roots = polynomial_roots(np.array([1.0, -2.0, 1.0]))  # (w-1)^2
    assert len(roots) == 1
    r, m = roots[0]
    assert m == 2
    assert abs(r - 1.0) < 1e-7


def test_polynomial_roots_random_roundtrip():
    rng = np.random.default_rng(7)
    true = rng.uniform(-2, 2, 16) + 1j * rng.uniform(-2, 2, 16)
    coeffs_desc = np.poly(true)
    roots = polynomial_roots(coeffs_desc[::-1])
    found = sorted((r for r, m in roots for _ in range(m)), key=lambda z: (z.real, z.imag))
    expect = sorted(true.tolist(), key=lambda z: (z.real, z.imag))
    assert max(abs(a - b) for a, b in zip(found, expect)) < 1e-8


def test_polynomial_roots_rejects_degenerate():
    with pytest.raises(ValueError):
        polynomial_roots(np.array([1.0]))
    with pytest.raises(ValueError):
        polynomial_roots(np.array([1.0, 2.0, 0.0]))


def test_fejer_riesz_two_plus_two_cos():
    f = TrigPoly.from_cos([(1, 2.0)], constant=2.0)
    report = fejer_riesz(f)
    s = report.factor
    # type-halved factor: frequencies ±1/2, coefficients 1 each
    assert s.frequencies() == [EF(Fraction(-1, 2)), EF(Fraction(1, 2))]
    assert abs(s.coefficient(EF(Fraction(-1, 2))) - 1.0) < 1e-12
    assert abs(s.coefficient(EF(Fraction(1, 2))) - 1.0) < 1e-12
    assert report.residual_sup <= 1e-12
    assert report.bandwidth_ratio == pytest.approx(0.5, abs=1e-15)
    assert report.passed


def test_fejer_riesz_constant():
    report = fejer_riesz(TrigPoly.constant(9.0))
    assert report.factor == TrigPoly.constant(3.0)
    assert report.residual_sup == 0.0


def test_fejer_riesz_lowest_coefficient_positive_real():
    rng = np.random.default_rng(3)
    roots = 1.2 + rng.uniform(0, 1.5, 6) + 1j * rng.uniform(-1, 1, 6)
    coeffs = np.poly(roots)
    s0 = TrigPoly([(EF(k), coeffs[len(coeffs) - 1 - k]) for k in range(len(coeffs))])
    f = modulus_squared(s0)
    s = fejer_riesz(f).factor
    low = spectrum(s).inf_freq
    c = s.coefficient(low)
    assert abs(c.imag) < 1e-12 * abs(c)
    assert c.real > 0


def test_fejer_riesz_roundtrip_degree8():
    rng = np.random.default_rng(11)
    for trial in range(5):
        # minimum-phase: all w-roots outside the closed unit disk
        mags = rng.uniform(1.15, 2.5, 8)
        args = rng.uniform(0, 2 * math.pi, 8)
        roots = mags * np.exp(1j * args)
        coeffs = np.poly(roots)  # descending, degree 8
        s0 = TrigPoly([(EF(8 - k), c) for k, c in enumerate(coeffs.tolist())])
        f = modulus_squared(s0)
        report = fejer_riesz(f)
        s = report.factor
        # align: shift s up to integer lattice and match s0 by a unimodular constant
        shift = spectrum(s0).inf_freq - spectrum(s).inf_freq
        s_shifted = s.modulate(shift)
        w0 = spectrum(s0).sup_freq
        mu = s0.coefficient(w0) / s_shifted.coefficient(w0)
        assert abs(abs(mu) - 1.0) < 1e-9
        diff = s0 - s_shifted * mu
        worst = max((abs(c) for _, c in diff.sorted_terms()), default=0.0)
        assert worst < 1e-8
        assert report.residual_sup <= 1e-8 * sup_scale(f)


def sup_scale(f):
    xs = np.linspace(0, 2 * math.pi, 2048)
    return float(np.max(np.abs(f.evaluate(xs))))


def test_fejer_riesz_half_lattice_factor():
    # odd-degree case: factor lives on half-integer frequencies
    f = TrigPoly.from_cos([(1, 2.0)], constant=2.5)
    report = fejer_riesz(f)
    s = report.factor
    freqs = s.frequencies()
    assert freqs == [EF(Fraction(-1, 2)), EF(Fraction(1, 2))]
    xs = np.linspace(-10, 10, 101)
    assert np.allclose(np.abs(s.evaluate(xs)) ** 2, f.evaluate(xs).real, atol=1e-10)


def test_fejer_riesz_rejects_negative():
    f = TrigPoly.from_cos([(1, 2.0)], constant=1.9)
    with pytest.raises(NotNonnegative):
        fejer_riesz(f)


def test_fejer_riesz_rejects_shallow_odd_circle_roots():
    # (2+2cos x)(2+2cos x - 1e-6): dips only ~1e-13 below zero, so the grid
    # scan passes and the odd-multiplicity circle roots must catch it
    a = TrigPoly.from_cos([(1, 2.0)], constant=2.0)
    b = TrigPoly.from_cos([(1, 2.0)], constant=2.0 - 1e-6)
    f = multiply(a, b)
    with pytest.raises(NotNonnegative):
        fejer_riesz(f)


def test_fejer_riesz_rejects_complex_valued():
    f = TrigPoly([(EF(1), 1.0)])
    with pytest.raises(NotNonnegative):
        fejer_riesz(f)


def test_fejer_riesz_rejects_incommensurable():
    f = TrigPoly.from_cos([(1, 1.0), (EF.sqrt_of(2), 1.0)], constant=3.0)
    with pytest.raises(IncommensurableSpectrum):
        fejer_riesz(f)


def test_fejer_riesz_deterministic_under_term_order():
    items = [(EF(0), 2.5 + 0j), (EF(1), 1.0 + 0j), (EF(-1), 1.0 + 0j)]
    s1 = fejer_riesz(TrigPoly(items)).factor
    s2 = fejer_riesz(TrigPoly(list(reversed(items)))).factor
    assert s1 == s2  # float-identical coefficients


def test_fejer_riesz_two_double_circle_roots():
    # touches zero at two points per period: double roots at w = -1 and w = i
    a = TrigPoly.from_cos([(1, 2.0)], constant=2.0)
    b = TrigPoly([(EF(0), 2.0), (EF(1), 1j), (EF(-1), -1j)])  # 2 - 2 sin x
    f = multiply(a, b)
    report = fejer_riesz(f)
    s = report.factor
    assert spectrum(s).bandwidth == EF(2)
    xs = np.linspace(-5, 5, 61)
    assert np.allclose(np.abs(s.evaluate(xs)) ** 2, f.evaluate(xs).real, atol=1e-9)


def test_fejer_riesz_quadruple_circle_root_fails_cleanly():
    # companion eigenvalues of a multiplicity-4 root carry eps**(1/4) errors,
    # far beyond the cluster radius, so the analysis must refuse rather than
    # return a sloppy factor
    base = TrigPoly.from_cos([(1, 2.0)], constant=2.0)
    f = multiply(base, base)
    with pytest.raises((NonConvergence, NotNonnegative)):
        fejer_riesz(f)


def test_zero_density_matches_bandwidth_over_pi():
    # count zeros of 2+2cos z in [-R, R] empirically: double zeros at odd pi
    f = TrigPoly.from_cos([(1, 2.0)], constant=2.0)
    R = 200 * math.pi
    xs = np.linspace(-R, R, 4_000_001)
    vals = f.evaluate(xs).real
    # local minima below threshold are double zeros
    interior = (vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:]) & (vals[1:-1] < 1e-4)
    count = 2 * int(np.sum(interior))  # multiplicity 2 each
    density = count / R
    bandwidth = float(spectrum(f).bandwidth)
    assert density == pytest.approx(bandwidth / math.pi, rel=2e-2)
    # the bandwidth/(2 pi) alternative is clearly wrong
    assert abs(density - bandwidth / (2 * math.pi)) > 0.2
