"""Reference states, Wigner distributions, fidelity and negativity measures.

Wigner convention: with q = (a + adag)/sqrt(2) (hbar = 1), the distribution
is normalized as integral W dq dp = 1 and the vacuum peaks at W(0,0) = 1/pi.
Phase-space shapes depend on this convention; all grids and exports use it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import DimensionMismatch, TruncationLeak
from .fock import QuantumState, ladder_ops

SQRT2 = np.sqrt(2.0)


def ideal_squeezed_state(r: float, dim: int) -> QuantumState:
    """exp((r/2)(adag^2 - a^2)) |0>; r > 0 squeezes the p quadrature."""
    return _projected_exact_state(
        lambda ops: expm(0.5 * r * (ops.adag @ ops.adag - ops.a @ ops.a)),
        dim)


def ideal_cubic_phase_state(gamma: float, r: float, dim: int) -> QuantumState:
    """exp(i gamma q^3) applied to the squeezed vacuum |r>.

    The cubic phase state has slowly decaying Fock tails, so both matrix
    exponentials are evaluated exactly on a padded working space and the
    result is projected back to ``dim`` levels (renormalized).
    """

    def build(ops):
        S = expm(0.5 * r * (ops.adag @ ops.adag - ops.a @ ops.a))
        q3 = ops.q @ ops.q @ ops.q
        return expm(1j * gamma * q3) @ S

    return _projected_exact_state(build, dim)


def _projected_exact_state(build, dim, tail_tol: float = 1e-3):
    """Apply exact exponentials on a padded space, then truncate to dim.

    Raises:
        TruncationLeak: if the construction has not converged even on the
            padded space (top-level population above 1e-6) or the state is
            not representable at the requested dimension (projected-out tail
            mass above ``tail_tol``).
    """
    work = max(2 * dim, dim + 32)
    ops = ladder_ops(work)
    ket_full = build(ops)[:, 0]
    top = float(np.abs(ket_full[-2:]).max() ** 2)
    if top > 1e-6:
        raise TruncationLeak(
            f"state construction not converged: top-level population "
            f"{top:.2e} on a dim-{work} working space; increase dim")
    tail = float(np.sum(np.abs(ket_full[dim:]) ** 2))
    if tail > tail_tol:
        raise TruncationLeak(
            f"state carries {tail:.2e} population above level {dim}; "
            "increase dim")
    ket = ket_full[:dim]
    return QuantumState(dim, ket=ket / np.linalg.norm(ket))


def fidelity(state: QuantumState, target: QuantumState) -> float:
    """F = <psi| rho |psi> against a pure target."""
    if state.dim != target.dim:
        raise DimensionMismatch(
            f"state dim {state.dim} != target dim {target.dim}")
    if target.ket is None:
        if abs(target.purity() - 1.0) > 1e-8:
            raise ValueError("target state must be pure")
        evals, evecs = np.linalg.eigh(target.rho)
        psi = evecs[:, -1]
    else:
        psi = target.ket
    if state.is_pure:
        return float(np.abs(np.vdot(psi, state.ket)) ** 2)
    return float(np.real(psi.conj() @ state.rho @ psi))


@dataclass
class WignerGrid:
    """Phase-space samples W[ip, iq] on a rectangular (q, p) grid."""

    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray

    @property
    def dq(self) -> float:
        return float(self.q_axis[1] - self.q_axis[0])

    @property
    def dp(self) -> float:
        return float(self.p_axis[1] - self.p_axis[0])

    def integral(self) -> float:
        return float(self.values.sum() * self.dq * self.dp)

    def min(self) -> float:
        return float(self.values.min())

    def marginal_q(self) -> np.ndarray:
        """Integrate over p: the position probability density."""
        return self.values.sum(axis=0) * self.dp

    def marginal_p(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.dq


@dataclass
class FidelityReport:
    fidelity: float
    negativity_volume: float
    achieved_r: float
    achieved_gamma: float


def wigner(state: QuantumState, q_axis=None, p_axis=None) -> WignerGrid:
    """Wigner distribution via the displaced-parity form.

    Evaluates W(q,p) = (1/pi) tr[rho D(alpha) P D(alpha)^dag]
    (alpha = (q + ip)/sqrt(2), P the photon-number parity) through its
    closed-form Laguerre expansion over the density-matrix diagonals, fully
    vectorized over the grid.  Cost is O(dim^2) grid passes.
    """
    if q_axis is None:
        q_axis = np.linspace(-5.0, 5.0, 201)
    if p_axis is None:
        p_axis = np.linspace(-5.0, 5.0, 201)
    q_axis = np.asarray(q_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    rho = state.rho
    dim = state.dim

    Q, P = np.meshgrid(q_axis, p_axis)
    beta = SQRT2 * (Q + 1j * P)          # 2 alpha
    x = np.abs(beta) ** 2
    log_abs_beta = np.log(np.maximum(np.abs(beta), 1e-300))
    arg_beta = np.angle(beta)

    ns = np.arange(dim)
    signs = (-1.0) ** ns
    W = np.zeros_like(x)
    for d in range(dim):
        # scalar weights sqrt(n! / (n+d)!) and diagonal of rho
        nmax = dim - d
        w = np.exp(0.5 * (gammaln(ns[:nmax] + 1) - gammaln(ns[:nmax] + d + 1)))
        coeff = rho[ns[:nmax], ns[:nmax] + d] * signs[:nmax] * w
        if not np.any(coeff):
            continue
        # sum_n coeff_n L_n^{(d)}(x) by upward recurrence
        Lm1 = np.zeros_like(x)
        L = np.ones_like(x)
        G = coeff[0] * L
        for n in range(1, nmax):
            Lm1, L = L, ((2 * n - 1 + d - x) * L - (n - 1 + d) * Lm1) / n
            G = G + coeff[n] * L
        # beta^d e^{-x/2} without overflow, then fold into W
        radial = np.exp(d * log_abs_beta - 0.5 * x)
        phase = np.exp(1j * d * arg_beta)
        contrib = np.real(radial * phase * G)
        W += contrib if d == 0 else 2.0 * contrib
    return WignerGrid(q_axis=q_axis, p_axis=p_axis, values=W / np.pi)


def wigner_displaced_parity_point(state: QuantumState, q: float,
                                  p: float) -> float:
    """Direct single-point evaluation via explicit displacement matrices.

    Independent of :func:`wigner`; used to cross-check the Laguerre route.
    """
    from .fock import displacement_operator
    dim = state.dim
    alpha = (q + 1j * p) / SQRT2
    D = displacement_operator(dim, alpha)
    parity = np.diag((-1.0 + 0j) ** np.arange(dim))
    M = D @ parity @ D.conj().T
    return float(np.real(np.einsum("ij,ji->", state.rho, M))) / np.pi


def negativity_volume(w: WignerGrid) -> float:
    """Integrated negative part: integral of max(0, -W) dq dp."""
    neg = np.clip(-w.values, 0.0, None)
    return float(neg.sum() * w.dq * w.dp)


def wigner_to_csv(w: WignerGrid, path):
    """Rows of (q, p, W) covering the full grid."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["q", "p", "W"])
        for ip, pv in enumerate(w.p_axis):
            for iq, qv in enumerate(w.q_axis):
                out.writerow([repr(float(qv)), repr(float(pv)),
                              repr(float(w.values[ip, iq]))])


def wigner_from_csv(path) -> WignerGrid:
    qs, ps, ws = [], [], []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        next(rd)
        for row in rd:
            qs.append(float(row[0]))
            ps.append(float(row[1]))
            ws.append(float(row[2]))
    q_axis = np.unique(np.asarray(qs))
    p_axis = np.unique(np.asarray(ps))
    vals = np.asarray(ws).reshape(p_axis.size, q_axis.size)
    return WignerGrid(q_axis=q_axis, p_axis=p_axis, values=vals)
