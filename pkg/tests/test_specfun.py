"""Special-function tests against brute-force oracles.

Expected values were computed with the oracles defined in this file
(Maclaurin series, explicit finite sums, Pochhammer double loops) and are
frozen as literals; the oracles are kept here so the numbers can be
regenerated independently of the implementation under test.
"""

import math

import numpy as np
import pytest

from vibronic_tpa import specfun as sf
from vibronic_tpa.errors import ConvergenceError, DomainError, NearSingularError

SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def erf_maclaurin(z, terms=200):
    """Brute-force Maclaurin series for erf; accurate for |z| <~ 5."""
    z = complex(z)
    acc = 0j
    term = z
    for n in range(terms):
        acc += term / (2 * n + 1)
        term *= -z * z / (n + 1)
    return 2.0 / SQRT_PI * acc


def erfi_maclaurin(z, terms=200):
    z = complex(z)
    acc = 0j
    term = z
    for n in range(terms):
        acc += term / (2 * n + 1)
        term *= z * z / (n + 1)
    return 2.0 / SQRT_PI * acc


def laguerre_finite_sum(n, alpha, x):
    """L_n^alpha(x) = sum_k (-1)^k C(n+alpha, n-k) x^k / k!"""
    acc = 0.0
    for k in range(n + 1):
        binom = 1.0
        for j in range(n - k):
            binom *= (alpha + k + 1 + j) / (j + 1)
        acc += (-1) ** k * binom * x**k / math.factorial(k)
    return acc


def gauss_series(a, b, c, z, terms=10_000):
    acc = 1.0 + 0j
    term = 1.0 + 0j
    for k in range(terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        acc += term
    return acc


def pochhammer(q, n):
    r = 1.0
    for i in range(n):
        r *= q + i
    return r


def appell_double_loop(a, b1, b2, c, x, y):
    acc = 0j
    for m in range(-int(b1) + 1):
        for n in range(-int(b2) + 1):
            acc += (
                pochhammer(a, m + n)
                * pochhammer(b1, m)
                * pochhammer(b2, n)
                / (pochhammer(c, m + n) * math.factorial(m) * math.factorial(n))
                * x**m
                * y**n
            )
    return acc


# ---------------------------------------------------------------------------
# gamma
# ---------------------------------------------------------------------------

class TestGamma:
    def test_integers(self):
        assert sf.gamma_real(1.0) == pytest.approx(1.0, rel=1e-13)
        assert sf.gamma_real(5.0) == pytest.approx(24.0, rel=1e-13)

    def test_half(self):
        assert sf.gamma_real(0.5) == pytest.approx(1.7724538509055160, rel=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.gamma_real(0.0)
        with pytest.raises(DomainError):
            sf.gamma_real(-2.5)

    def test_log_gamma_matches(self):
        for x in [0.1, 0.7, 3.3, 42.0, 151.0, 283.0]:
            assert sf.log_gamma_real(x) == pytest.approx(math.lgamma(x), abs=1e-11)


# ---------------------------------------------------------------------------
# complex error functions
# ---------------------------------------------------------------------------

class TestErf:
    def test_zero(self):
        assert sf.erf_complex(0.0) == 0.0

    def test_real_two(self):
        # frozen from erf_maclaurin(2)
        assert complex(sf.erf_complex(2.0)) == pytest.approx(
            0.99532226501895273, abs=1e-13
        )

    def test_complex_point(self):
        # frozen from erf_maclaurin(1 + 1j)
        val = complex(sf.erf_complex(1.0 + 1.0j))
        assert val == pytest.approx(1.3161512816979476 + 0.19045346923783469j, abs=1e-12)

    def test_against_series_patch(self):
        # the float64 Maclaurin oracle itself is only trustworthy to
        # ~1e-12 inside |z| <= 3; beyond that the large-argument test
        # below takes over with an arbitrary-precision reference
        rng = np.random.default_rng(11)
        z = rng.uniform(-3, 3, 80) + 1j * rng.uniform(-3, 3, 80)
        z = z[np.abs(z) <= 3.0]
        ref = np.array([erf_maclaurin(v) for v in z])
        diff = np.abs(sf.erf_complex(z) - ref)
        assert np.max(diff / np.maximum(1.0, np.abs(ref))) < 1e-12

    def test_odd_and_conjugate_symmetry(self):
        rng = np.random.default_rng(3)
        z = rng.uniform(-8, 8, 1000) + 1j * rng.uniform(-8, 8, 1000)
        z = z[np.abs(z) <= 8.0]
        ez = sf.erf_complex(z)
        scale = np.maximum(np.abs(ez), 1.0)
        assert np.max(np.abs(ez + sf.erf_complex(-z)) / scale) < 1e-13
        assert np.max(np.abs(np.conj(ez) - sf.erf_complex(np.conj(z))) / scale) < 1e-13

    def test_large_argument_accuracy(self):
        # |z| <= 12: absolute accuracy where erf is order one, relative
        # accuracy in the exponentially growing directions (where any
        # fixed absolute target is unattainable in double precision)
        import mpmath as mp

        mp.mp.dps = 40
        rng = np.random.default_rng(5)
        z = rng.uniform(-12, 12, 120) + 1j * rng.uniform(-12, 12, 120)
        z = z[np.abs(z) <= 12.0]
        mine = sf.erf_complex(z)
        ref = np.array([complex(mp.erf(complex(v))) for v in z])
        small = np.abs(ref) <= 1.5
        assert np.max(np.abs(mine[small] - ref[small])) < 1e-12
        rel = np.abs(mine[~small] - ref[~small]) / np.abs(ref[~small])
        assert np.max(rel) < 1e-12


class TestErfi:
    def test_zero(self):
        assert sf.erfi_complex(0.0) == 0.0

    def test_real_gives_real(self):
        vals = sf.erfi_complex(np.array([0.3, 1.1, 2.7], dtype=complex))
        assert np.max(np.abs(vals.imag)) < 1e-13 * np.max(np.abs(vals.real))

    def test_one(self):
        # frozen from erfi_maclaurin(1)
        assert complex(sf.erfi_complex(1.0)) == pytest.approx(
            1.6504257587975429, abs=1e-13
        )

    def test_defining_identity(self):
        rng = np.random.default_rng(17)
        z = rng.uniform(-5, 5, 300) + 1j * rng.uniform(-5, 5, 300)
        lhs = sf.erfi_complex(z) + 1j * sf.erf_complex(1j * z)
        assert np.max(np.abs(lhs)) < 1e-13 * max(1.0, np.max(np.abs(sf.erfi_complex(z))))


class TestErfDamped:
    def test_matches_plain_for_small_shift(self):
        x = np.linspace(-3, 3, 41)
        for c in (-1.5, 0.0, 0.4, 2.0):
            ref = np.exp(-(c**2)) * sf.erf_complex(x + 1j * c)
            assert np.max(np.abs(sf.erf_damped(x, c) - ref)) < 1e-13

    def test_bounded_for_huge_shift(self):
        x = np.linspace(-12, 12, 101)
        for c in (50.0, -120.0, 300.0):
            s = sf.erf_damped(x, c)
            assert np.all(np.isfinite(s))
            assert np.max(np.abs(s)) <= 1.0 + 1e-12

    def test_saturation_limits(self):
        # for |x| >> 1 the damped erf tends to +/- exp(-c^2)
        for c in (0.7, 3.0):
            assert complex(sf.erf_damped(10.0, c)) == pytest.approx(
                math.exp(-(c**2)), abs=1e-12
            )
            assert complex(sf.erf_damped(-10.0, c)) == pytest.approx(
                -math.exp(-(c**2)), abs=1e-12
            )


# ---------------------------------------------------------------------------
# Laguerre
# ---------------------------------------------------------------------------

class TestLaguerre:
    def test_degree_zero_and_one(self):
        x = np.linspace(-2, 9, 23)
        assert np.all(sf.laguerre_generalized(0, 1.7, x) == 1.0)
        assert np.max(np.abs(sf.laguerre_generalized(1, 1.7, x) - (1 + 1.7 - x))) == 0.0

    def test_explicit_sum(self):
        # frozen from laguerre_finite_sum(5, 2.5, 1.3)
        assert sf.laguerre_generalized(5, 2.5, 1.3) == pytest.approx(
            -0.46684733333333333, rel=1e-12
        )
        for n, alpha, x in [(3, 0.0, 2.0), (7, 4.5, 0.3), (12, 1.25, 6.0)]:
            assert sf.laguerre_generalized(n, alpha, x) == pytest.approx(
                laguerre_finite_sum(n, alpha, x), rel=1e-10
            )

    def test_recurrence_residual(self):
        alpha, x = 3.7, 2.9
        vals = [sf.laguerre_generalized(n, alpha, x) for n in range(202)]
        worst = 0.0
        for n in range(1, 201):
            resid = abs(
                (n + 1) * vals[n + 1]
                - (2 * n + 1 + alpha - x) * vals[n]
                + (n + alpha) * vals[n - 1]
            )
            scale = max(abs(vals[n + 1]), abs(vals[n]), abs(vals[n - 1]), 1.0)
            worst = max(worst, resid / scale)
        assert worst < 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.laguerre_generalized(-1, 0.5, 1.0)
        with pytest.raises(DomainError):
            sf.laguerre_generalized(2.5, 0.5, 1.0)


# ---------------------------------------------------------------------------
# hypergeometric functions
# ---------------------------------------------------------------------------

class TestHyp2f1:
    def test_empty_series(self):
        assert sf.hyp2f1_complex(0.7, 2.2, 3.1, 0.0) == 1.0

    def test_log_identity(self):
        # 2F1(1,1;2;z) = -ln(1-z)/z; frozen at z = 0.3
        assert complex(sf.hyp2f1_complex(1, 1, 2, 0.3)) == pytest.approx(
            1.1889164797957746, rel=1e-12
        )

    def test_appendix_shaped_point(self):
        # frozen from the 10_000-term direct series oracle
        val = sf.hyp2f1_complex(1.0, 6.0, 4.0, -0.45 + 0.2j)
        assert val == pytest.approx(0.57009192547623549 + 0.10666094832698567j, rel=1e-11)

    def test_matches_series_inside_disc(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            n = rng.integers(0, 6)
            l = rng.integers(0, 6)
            a, b, c = 1.0, 2.0 * (n + l + 1), 2.0 * (n + 1)
            z = rng.uniform(-0.5, 0.5) + 1j * rng.uniform(-0.5, 0.5)
            if abs(z) > 0.5:
                z = 0.5 * z / abs(z)
            ref = gauss_series(a, b, c, z)
            assert sf.hyp2f1_complex(a, b, c, z) == pytest.approx(ref, rel=1e-10)

    def test_transformed_regions_against_pfaff_consistency(self):
        # evaluate far outside the unit disc and check the Pfaff identity
        # 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)) holds numerically
        pts = [2.0 + 1.5j, -3.0 + 0.2j, 0.8 + 0.9j, 1.4 - 0.8j, -7.0 + 0.0j]
        for z in pts:
            a, b, c = 0.5, 1.75, 2.25
            lhs = sf.hyp2f1_complex(a, b, c, z)
            rhs = (1 - z) ** (-a) * sf.hyp2f1_complex(a, c - b, c, z / (z - 1))
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_branch_cut_guard(self):
        with pytest.raises(NearSingularError):
            sf.hyp2f1_complex(0.5, 1.5, 2.5, 1.5)
        with pytest.raises(NearSingularError):
            sf.hyp2f1_complex(0.5, 1.5, 2.5, 2.0 + 1e-12j)

    def test_branch_sides_differ(self):
        up = sf.hyp2f1_complex(0.5, 1.5, 2.5, 1.5 + 1e-4j)
        dn = sf.hyp2f1_complex(0.5, 1.5, 2.5, 1.5 - 1e-4j)
        assert abs(up - np.conj(dn)) < 1e-6 * abs(up)
        assert abs(up.imag) > 1e-3

    def test_c_pole_rejected(self):
        with pytest.raises(DomainError):
            sf.hyp2f1_complex(1.0, 2.0, 0.0, 0.3)
        with pytest.raises(DomainError):
            sf.hyp2f1_complex(1.0, 2.0, -3.0, 0.3)


class TestHyp2f1Regularized:
    def test_unit_gamma(self):
        assert sf.hyp2f1_regularized(0.9, 1.3, 2.0, 0.0) == pytest.approx(1.0, rel=1e-13)

    def test_positive_c(self):
        # frozen from the series oracle: 2F1(1,4;2;0.5) = 4.666...
        assert complex(sf.hyp2f1_regularized(1, 4, 2, 0.5)) == pytest.approx(
            4.6666666666666667, rel=1e-11
        )

    def test_nonpositive_c_limit(self):
        # oracle: extrapolate 2F1(a,b;c+eps;z)/Gamma(c+eps) via two epsilons
        import mpmath as mp

        mp.mp.dps = 40
        for a, b, c, z in [(1.0, 2.0, 0.0, 0.3 + 0.1j), (0.5, 3.0, -2.0, -0.4)]:
            eps = mp.mpf("1e-25")
            ref = complex(mp.hyp2f1(a, b, c + eps, z) / mp.gamma(c + eps))
            assert sf.hyp2f1_regularized(a, b, c, z) == pytest.approx(ref, rel=1e-10)


class TestAppellF1:
    def test_empty(self):
        assert sf.appell_f1_terminating(2.0, 0, 0, 3.0, 0.4 + 0.2j, -0.7j) == 1.0

    def test_reduction_to_2f1(self):
        # F1(a; b1, 0; c; x, y) = 2F1(a, b1; c; x)
        for b1 in (-2, -6):
            x = 0.37 - 0.11j
            lhs = sf.appell_f1_terminating(2.0, b1, 0, 3.0, x, 0.9j)
            rhs = sf.hyp2f1_complex(2.0, float(b1), 3.0, x)
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_double_loop_oracle(self):
        cases = [
            (2.0, -4, -2, 3.0, 0.3 + 0.1j, -0.2j),
            (2.0, -8, -6, 3.0, -0.9 + 0.4j, 1.7 - 0.2j),
            (1.5, -3, -5, 2.2, 2.0j, -1.1 + 0.0j),
        ]
        for a, b1, b2, c, x, y in cases:
            ref = appell_double_loop(a, b1, b2, c, x, y)
            assert sf.appell_f1_terminating(a, b1, b2, c, x, y) == pytest.approx(
                ref, rel=1e-11
            )

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.appell_f1_terminating(2.0, 1, -2, 3.0, 0.1, 0.1)
        with pytest.raises(DomainError):
            sf.appell_f1_terminating(2.0, -1.5, -2, 3.0, 0.1, 0.1)
