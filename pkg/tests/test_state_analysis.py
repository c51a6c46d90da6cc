"""Wigner distributions, fidelities, and negativity measures."""

import numpy as np
import pytest

from snailsim import (DimensionMismatch, QuantumState, TruncationLeak,
                      displace, fidelity, ideal_cubic_phase_state,
                      ideal_squeezed_state, ladder_ops, negativity_volume,
                      rotate, variance, wigner)
from snailsim.analysis import (wigner_displaced_parity_point, wigner_from_csv,
                               wigner_to_csv)


def hermite_functions(qs, nmax):
    """Orthonormal oscillator eigenfunctions for the Var(q)=1/2 convention."""
    psi = np.zeros((nmax, qs.size))
    psi[0] = np.pi ** -0.25 * np.exp(-qs**2 / 2)
    if nmax > 1:
        psi[1] = np.sqrt(2.0) * qs * psi[0]
    for n in range(1, nmax - 1):
        psi[n + 1] = (np.sqrt(2.0 / (n + 1)) * qs * psi[n]
                      - np.sqrt(n / (n + 1)) * psi[n - 1])
    return psi


def position_density(state, qs):
    """|psi(q)|^2 from the Fock amplitudes; independent of the Wigner path."""
    psi = hermite_functions(qs, state.dim)
    if state.is_pure:
        wave = state.ket @ psi
        return np.abs(wave) ** 2
    return np.real(np.einsum("iq,ij,jq->q", psi, state.rho, psi))


class TestIdealStates:
    def test_trivial_reduction_to_vacuum(self):
        s = ideal_cubic_phase_state(0.0, 0.0, 30)
        assert abs(s.ket[0]) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_squeezed_variance(self):
        s = ideal_squeezed_state(0.7, 60)
        ops = ladder_ops(60)
        assert variance(s, ops.p) == pytest.approx(np.exp(-1.4) / 2,
                                                   rel=1e-8)
        assert variance(s, ops.q) == pytest.approx(np.exp(1.4) / 2, rel=1e-6)

    def test_cubic_phase_state_has_negativity(self):
        s = ideal_cubic_phase_state(0.1, 0.7, 70)
        w = wigner(s, np.linspace(-6, 6, 161), np.linspace(-6, 6, 161))
        assert w.min() < 0
        assert negativity_volume(w) > 0

    def test_truncation_guard(self):
        with pytest.raises(TruncationLeak):
            ideal_squeezed_state(1.5, 8)


class TestWigner:
    def test_vacuum_peak_and_shape(self):
        w = wigner(QuantumState.vacuum(30))
        Q, P = np.meshgrid(w.q_axis, w.p_axis)
        expected = np.exp(-(Q**2 + P**2)) / np.pi
        assert np.max(np.abs(w.values - expected)) < 1e-12
        iq = np.argmin(np.abs(w.q_axis))
        assert w.values[iq, iq] == pytest.approx(1 / np.pi, rel=1e-12)

    def test_single_photon_negativity(self):
        w = wigner(QuantumState.fock(30, 1))
        Q, P = np.meshgrid(w.q_axis, w.p_axis)
        x = Q**2 + P**2
        expected = (2 * x - 1) * np.exp(-x) / np.pi
        assert np.max(np.abs(w.values - expected)) < 1e-12

    def test_coherent_state_is_shifted_gaussian(self):
        beta = 1.1 - 0.4j
        s = displace(QuantumState.vacuum(50), beta)
        w = wigner(s)
        Q, P = np.meshgrid(w.q_axis, w.p_axis)
        q0, p0 = np.sqrt(2) * beta.real, np.sqrt(2) * beta.imag
        expected = np.exp(-((Q - q0)**2 + (P - p0)**2)) / np.pi
        assert np.max(np.abs(w.values - expected)) < 1e-9

    def test_normalization(self):
        for state in (QuantumState.vacuum(40),
                      ideal_squeezed_state(0.7, 60),
                      ideal_cubic_phase_state(0.1, 0.7, 70)):
            w = wigner(state, np.linspace(-7, 7, 201),
                       np.linspace(-7, 7, 201))
            assert w.integral() == pytest.approx(1.0, abs=1e-3)

    def test_against_displaced_parity_oracle(self):
        # mixed state; direct expm-based displaced-parity evaluation.  The
        # oracle itself truncates, so stay in the region where the displaced
        # operator is numerically exact for the state's support.
        dim = 40
        sq = ideal_squeezed_state(0.4, dim)
        coh = displace(QuantumState.vacuum(dim), 0.5 + 0.2j)
        rho = 0.6 * sq.rho + 0.4 * coh.rho
        state = QuantumState.from_rho(rho)
        w = wigner(state, np.linspace(-2, 2, 7), np.linspace(-2, 2, 7))
        for iq in (0, 2, 3, 5):
            for ip in (1, 3, 4, 6):
                direct = wigner_displaced_parity_point(
                    state, w.q_axis[iq], w.p_axis[ip])
                assert w.values[ip, iq] == pytest.approx(direct, abs=1e-8)

    def test_marginal_matches_position_density(self):
        for state in (ideal_squeezed_state(0.5, 60),
                      ideal_cubic_phase_state(0.1, 0.6, 70),
                      displace(QuantumState.vacuum(40), 0.7)):
            w = wigner(state, np.linspace(-7, 7, 281),
                       np.linspace(-7, 7, 281))
            density = position_density(state, w.q_axis)
            assert np.max(np.abs(w.marginal_q() - density)) < 1e-3

    def test_rotation_covariance(self):
        from scipy.interpolate import RegularGridInterpolator
        state = ideal_cubic_phase_state(0.08, 0.5, 60)
        theta = 0.6
        axis = np.linspace(-7, 7, 201)
        w0 = wigner(state, axis, axis)
        w1 = wigner(rotate(state, theta), axis, axis)
        interp = RegularGridInterpolator((w0.p_axis, w0.q_axis), w0.values,
                                         bounds_error=False, fill_value=0.0)
        # the rotated state's W at (q,p) equals the original W at the
        # counter-rotated phase-space point
        sub = np.linspace(-3.5, 3.5, 41)
        Q, P = np.meshgrid(sub, sub)
        qr = np.cos(theta) * Q - np.sin(theta) * P
        pr = np.sin(theta) * Q + np.cos(theta) * P
        w1_interp = RegularGridInterpolator((w1.p_axis, w1.q_axis), w1.values)
        vals1 = w1_interp(np.column_stack([P.ravel(), Q.ravel()]))
        vals0 = interp(np.column_stack([pr.ravel(), qr.ravel()]))
        assert np.max(np.abs(vals1 - vals0)) < 2e-3

    def test_csv_roundtrip(self, tmp_path):
        w = wigner(QuantumState.vacuum(15), np.linspace(-2, 2, 21),
                   np.linspace(-2, 2, 19))
        path = tmp_path / "w.csv"
        wigner_to_csv(w, path)
        back = wigner_from_csv(path)
        assert np.array_equal(back.q_axis, w.q_axis)
        assert np.array_equal(back.p_axis, w.p_axis)
        assert np.max(np.abs(back.values - w.values)) == 0.0


class TestFidelity:
    def test_identical_pure_states(self):
        s = ideal_squeezed_state(0.3, 30)
        assert fidelity(s, s) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_fock_states(self):
        assert fidelity(QuantumState.vacuum(10),
                        QuantumState.fock(10, 1)) == 0.0

    def test_symmetry_on_pure_pairs(self):
        rng = np.random.default_rng(7)
        for _ in range(8):
            a = rng.normal(size=20) + 1j * rng.normal(size=20)
            b = rng.normal(size=20) + 1j * rng.normal(size=20)
            sa = QuantumState.from_ket(a / np.linalg.norm(a))
            sb = QuantumState.from_ket(b / np.linalg.norm(b))
            assert fidelity(sa, sb) == pytest.approx(fidelity(sb, sa),
                                                     rel=1e-12)

    def test_mixed_state_convention(self):
        dim = 16
        rho = 0.5 * QuantumState.vacuum(dim).rho \
            + 0.5 * QuantumState.fock(dim, 2).rho
        mixed = QuantumState.from_rho(rho)
        target = ideal_squeezed_state(0.2, dim)
        psi = target.ket
        assert fidelity(mixed, target) == pytest.approx(
            np.real(psi.conj() @ rho @ psi), rel=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(DimensionMismatch):
            fidelity(QuantumState.vacuum(10), QuantumState.vacuum(12))


class TestNegativity:
    def test_vacuum_zero(self):
        assert negativity_volume(wigner(QuantumState.vacuum(20))) == 0.0

    def test_single_photon_analytic(self):
        # closed form: integral of the negative disc is 2 e^{-1/2} - 1
        w = wigner(QuantumState.fock(40, 1), np.linspace(-6, 6, 241),
                   np.linspace(-6, 6, 241))
        assert negativity_volume(w) == pytest.approx(2 * np.exp(-0.5) - 1,
                                                     abs=1e-3)

    def test_grid_refinement_stability(self):
        s = ideal_cubic_phase_state(0.1, 0.7, 70)
        coarse = wigner(s, np.linspace(-6, 6, 121), np.linspace(-6, 6, 121))
        fine = wigner(s, np.linspace(-6, 6, 241), np.linspace(-6, 6, 241))
        nc, nf = negativity_volume(coarse), negativity_volume(fine)
        assert abs(nf - nc) / nf < 0.02
