"""SNAIL potential, minimum search, and expansion coefficients."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snailsim import (NoMinimumFound, NoRootInInterval, SnailParams,
                      ac_coeff_amplitudes, expand_potential, find_minimum,
                      kerr_free_flux, potential_eval, static_coeffs)
from snailsim.snail import _ac_amplitudes_from_u, _stationarity

PAPER = dict(n=3, alpha=0.1, l_j=600e-12, phi_ext_dc=0.3931 * 2 * np.pi)


def paper_params():
    return SnailParams.from_inductance(**PAPER)


def unit_params(phi_ext=0.0, n=3, alpha=0.1):
    return SnailParams(n=n, alpha=alpha, e_j=1.0, phi_ext_dc=phi_ext)


snail_strategy = st.builds(
    unit_params,
    phi_ext=st.floats(0.0, 2 * np.pi * 3, allow_nan=False),
    n=st.integers(1, 4),
    alpha=st.floats(0.05, 0.5),
)


def spectral_derivative(p, phi0, m, n_samples=32):
    """m-th derivative of U/E_J at phi0 from FFT of potential samples.

    The potential is a two-harmonic Fourier series with period 2 pi n, so
    spectral differentiation of its samples is exact to machine precision.
    Independent of the closed-form derivative cycle used by static_coeffs.
    """
    period = 2 * np.pi * p.n
    phi = phi0 + period * np.arange(n_samples) / n_samples
    u = potential_eval(p, phi) / p.e_j
    f = np.fft.fft(u) / n_samples
    k = 2 * np.pi * np.fft.fftfreq(n_samples, d=period / n_samples)
    return float(np.real(np.sum(f * (1j * k) ** m)))


class TestPotential:
    def test_zero_flux_zero_phase(self):
        p = unit_params()
        assert potential_eval(p, 0.0) == pytest.approx(-3.1, abs=1e-14)

    def test_zero_flux_pi_phase(self):
        p = unit_params()
        expected = -3 * np.cos(np.pi / 3) + 0.1
        assert potential_eval(p, np.pi) == pytest.approx(expected, abs=1e-12)

    def test_matches_integrated_derivative(self):
        # cumulative quadrature of the stationarity expression must
        # reconstruct the potential up to a constant
        p = paper_params()
        phi = np.linspace(-1.0, 4.0, 2001)
        du = _stationarity(p, phi)
        from scipy.integrate import cumulative_trapezoid
        rebuilt = cumulative_trapezoid(du, phi, initial=0.0)
        direct = (potential_eval(p, phi) - potential_eval(p, phi[0])) / p.e_j
        assert np.max(np.abs(rebuilt - direct)) < 5e-7


class TestFindMinimum:
    def test_symmetric_zero_flux(self):
        assert find_minimum(unit_params(0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_symmetric_squid_splits_flux(self):
        # alpha -> 1 with n = 1: the two branches share the flux equally
        p = SnailParams(n=1, alpha=1 - 1e-9, e_j=1.0, phi_ext_dc=1.3)
        assert find_minimum(p) == pytest.approx(1.3 / 2, abs=1e-6)

    def test_against_bisection_oracle(self):
        p = paper_params()
        lo, hi = p.phi_ext_dc - np.pi, p.phi_ext_dc
        for _ in range(60):  # plain bisection to ~1e-14 residual
            mid = 0.5 * (lo + hi)
            if _stationarity(p, lo) * _stationarity(p, mid) <= 0:
                hi = mid
            else:
                lo = mid
        assert find_minimum(p) == pytest.approx(0.5 * (lo + hi), abs=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(snail_strategy)
    def test_residual_below_tolerance(self, p):
        phi_min = find_minimum(p)
        assert abs(_stationarity(p, phi_min)) < 1e-12

    def test_no_bracket_raises(self):
        with pytest.raises(NoMinimumFound):
            find_minimum(unit_params(1.1), n_scan=2)


class TestStaticCoeffs:
    def test_c2_zero_flux(self):
        c = static_coeffs(unit_params())
        assert c.c_dc[2] == pytest.approx(0.1 + 1 / 3, rel=1e-12)

    def test_c3_vanishes_at_symmetric_point(self):
        c = static_coeffs(unit_params())
        assert abs(c.c_dc[3]) < 1e-13

    def test_c1_vanishes_at_minimum(self):
        c = static_coeffs(paper_params())
        assert abs(c.c_dc[1]) < 1e-12

    def test_against_finite_difference_oracle(self):
        # 5-point central stencil where float64 noise allows (m = 2, 3)
        p = paper_params()
        c = static_coeffs(p)
        phi0 = find_minimum(p)
        h = 1e-3
        shifts = np.array([-2, -1, 0, 1, 2]) * h
        u = potential_eval(p, phi0 + shifts) / p.e_j
        fd2 = (-u[0] + 16 * u[1] - 30 * u[2] + 16 * u[3] - u[4]) / (12 * h**2)
        fd3 = (-u[0] + 2 * u[1] - 2 * u[3] + u[4]) / (2 * h**3)
        assert c.c_dc[2] == pytest.approx(fd2, rel=1e-8)
        assert c.c_dc[3] == pytest.approx(fd3, rel=1e-4)

    def test_against_spectral_derivative_oracle(self):
        # numerical differentiation of potential samples, exact for the
        # band-limited potential; reaches 1e-8 where plain stencils cannot
        p = paper_params()
        c = static_coeffs(p)
        phi0 = find_minimum(p)
        for m in (2, 3, 4):
            assert c.c_dc[m] == pytest.approx(
                spectral_derivative(p, phi0, m), rel=1e-8)

    @settings(max_examples=40, deadline=None)
    @given(snail_strategy)
    def test_numerical_derivative_property(self, p):
        c = static_coeffs(p)
        phi0 = find_minimum(p)
        for m in range(2, 5):
            assert c.c_dc[m] == pytest.approx(
                spectral_derivative(p, phi0, m), rel=1e-6, abs=1e-10)

    def test_flux_periodicity(self):
        base = paper_params()
        shifted = SnailParams(n=3, alpha=0.1, e_j=base.e_j,
                              phi_ext_dc=PAPER["phi_ext_dc"] + 6 * np.pi)
        ca, cb = static_coeffs(base), static_coeffs(shifted)
        assert np.max(np.abs(ca.c_dc - cb.c_dc)) < 1e-12


class TestAcAmplitudes:
    def test_recurrence_identities_exact(self):
        c = ac_coeff_amplitudes(paper_params())
        n2 = paper_params().n ** 2
        assert c.c_ac_lin[3] * n2 + c.c_ac_lin[1] == 0.0
        assert c.c_ac_quad[4] * n2 + c.c_ac_quad[2] == 0.0

    @settings(max_examples=40, deadline=None)
    @given(snail_strategy)
    def test_ratio_property(self, p):
        c = ac_coeff_amplitudes(p)
        if c.c_ac_lin[1] != 0.0:
            assert c.c_ac_lin[3] / c.c_ac_lin[1] == pytest.approx(
                -1.0 / p.n**2, rel=1e-15)

    def test_amplitudes_vanish_at_quarter_cycle(self):
        # cosine prefactor zero: the resonant amplitudes all vanish
        lin, quad = _ac_amplitudes_from_u(3, np.pi / 2, 4)
        for val in (lin[1], lin[3], quad[2], quad[4]):
            assert abs(val) < 1e-16

    def test_against_term_expansion_oracle(self):
        # expand the potential to second order in the drive amplitude:
        # phi-derivatives via the spectral oracle (exact), drive-derivatives
        # via central differences in the flux displacement
        p = paper_params()
        c = expand_potential(p)
        phi_min = find_minimum(p)

        def coeff(m, a):
            # keep the expansion point fixed at the static minimum
            return spectral_derivative(p.with_flux(p.phi_ext_dc + a),
                                       phi_min, m)

        eps1, eps2 = 1e-4, 1e-2  # second difference needs the larger step
        for m in (1, 2, 3, 4):
            lin_fd = (coeff(m, eps1) - coeff(m, -eps1)) / (2 * eps1)
            quad_fd = (coeff(m, eps2) - 2 * coeff(m, 0) + coeff(m, -eps2)) \
                / eps2**2 / 2
            assert c.c_ac_lin[m] == pytest.approx(lin_fd, rel=1e-6, abs=1e-9)
            assert c.c_ac_quad[m] == pytest.approx(quad_fd, rel=1e-3,
                                                   abs=1e-7)

    def test_resonant_only_zeroes_cross_entries(self):
        c = ac_coeff_amplitudes(paper_params(), resonant_only=True)
        assert c.c_ac_lin[2] == 0.0 and c.c_ac_lin[4] == 0.0
        assert c.c_ac_quad[1] == 0.0 and c.c_ac_quad[3] == 0.0
        full = ac_coeff_amplitudes(paper_params())
        assert c.c_ac_lin[3] == full.c_ac_lin[3]
        assert c.c_ac_quad[2] == full.c_ac_quad[2]


class TestKerrFreeFlux:
    def test_root_against_scan_oracle(self):
        p = paper_params()
        root = kerr_free_flux(p, (1.5, 2.6))
        # independent dense-scan + bisection oracle
        xs = np.linspace(1.5, 2.6, 10_000)

        def c4(phi_ext):
            q = p.with_flux(phi_ext)
            return static_coeffs(q).c_dc[4]

        vals = np.array([c4(x) for x in xs[::50]])
        idx = np.nonzero(vals[:-1] * vals[1:] < 0)[0][0]
        lo, hi = xs[::50][idx], xs[::50][idx + 1]
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if c4(lo) * c4(mid) <= 0:
                hi = mid
            else:
                lo = mid
        assert root == pytest.approx(0.5 * (lo + hi), abs=1e-8)

    def test_near_operating_flux(self):
        root = kerr_free_flux(paper_params(), (1.5, 2.6))
        assert abs(root / (2 * np.pi) - 0.39) < 0.05

    def test_constant_sign_interval_raises(self):
        with pytest.raises(NoRootInInterval):
            kerr_free_flux(paper_params(), (0.1, 0.5))


class TestParamsValidation:
    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            SnailParams(n=3, alpha=1.2, e_j=1.0, phi_ext_dc=0.0)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            SnailParams(n=0, alpha=0.1, e_j=1.0, phi_ext_dc=0.0)

    def test_flux_reduced_to_canonical_branch(self):
        p = SnailParams(n=3, alpha=0.1, e_j=1.0, phi_ext_dc=-0.5)
        assert 0.0 <= p.phi_ext_dc < 6 * np.pi
