"""Truncated-Fock-space operators, states, and Lindblad time evolution.

Conventions: hbar = 1, q = (a + adag)/sqrt(2), p = (a - adag)/(i sqrt(2)),
so the vacuum has Var(q) = Var(p) = 1/2.  Operators are plain complex numpy
arrays; powers such as (a + adag)^3 are formed by multiplying the truncated
matrices, which is exact away from the top of the basis.

The master equation integrated here is

    drho/dt = -i [H(t), rho] + kappa (a rho adag - 1/2 {adag a, rho})

with a single-photon-loss jump operator sqrt(kappa) a.  For kappa = 0 and a
pure initial state the equivalent Schroedinger equation is integrated on the
ket instead, which is substantially cheaper; both paths use the same adaptive
embedded Runge-Kutta controller and agree to integrator tolerance.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .circuit import CouplingSet
from .errors import (DimensionMismatch, IntegratorFailure, TruncationLeak)

SQRT2 = np.sqrt(2.0)

LadderOps = namedtuple("LadderOps", ["a", "adag", "n", "q", "p"])


def ladder_ops(dim: int) -> LadderOps:
    """Annihilation, creation, number and quadrature matrices at truncation dim."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    adag = a.conj().T
    n = adag @ a
    q = (a + adag) / SQRT2
    p = (a - adag) / (1j * SQRT2)
    return LadderOps(a=a, adag=adag, n=n, q=q, p=p)


def _check_dims(dim: int, op: np.ndarray):
    if op.shape != (dim, dim):
        raise DimensionMismatch(
            f"operator shape {op.shape} does not match dim {dim}")


class QuantumState:
    """Truncated-Fock-space state, stored as a ket when pure.

    A density matrix is materialized on demand.  Construction validates the
    trace/norm (to 1e-8) and Hermiticity; positivity down to a -1e-8 floor
    can be checked explicitly with :meth:`validate_positivity`.
    """

    __slots__ = ("dim", "_ket", "_rho")

    def __init__(self, dim, ket=None, rho=None):
        self.dim = int(dim)
        self._ket = ket
        self._rho = rho

    @classmethod
    def from_ket(cls, ket, tol: float = 1e-8) -> "QuantumState":
        ket = np.asarray(ket, dtype=complex).ravel()
        norm2 = float(np.real(np.vdot(ket, ket)))
        if abs(norm2 - 1.0) > tol:
            raise ValueError(f"ket norm^2 deviates from 1 by {norm2 - 1:.2e}")
        return cls(ket.size, ket=ket)

    @classmethod
    def from_rho(cls, rho, tol: float = 1e-8) -> "QuantumState":
        rho = np.asarray(rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, "
                                    f"got shape {rho.shape}")
        tr = float(np.real(np.trace(rho)))
        if abs(tr - 1.0) > tol:
            raise ValueError(f"trace deviates from 1 by {tr - 1:.2e}")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > 1e-9:
            raise ValueError(f"density matrix not Hermitian: {herm:.2e}")
        return cls(rho.shape[0], rho=rho)

    @classmethod
    def vacuum(cls, dim: int) -> "QuantumState":
        k = np.zeros(dim, dtype=complex)
        k[0] = 1.0
        return cls(dim, ket=k)

    @classmethod
    def fock(cls, dim: int, n: int) -> "QuantumState":
        k = np.zeros(dim, dtype=complex)
        k[n] = 1.0
        return cls(dim, ket=k)

    @property
    def is_pure(self) -> bool:
        return self._ket is not None

    @property
    def ket(self) -> Optional[np.ndarray]:
        return self._ket

    @property
    def rho(self) -> np.ndarray:
        if self._rho is None:
            self._rho = np.outer(self._ket, self._ket.conj())
        return self._rho

    def expectation(self, op: np.ndarray) -> complex:
        _check_dims(self.dim, op)
        if self._ket is not None:
            return complex(np.vdot(self._ket, op @ self._ket))
        return complex(np.einsum("ij,ji->", self._rho, op))

    def variance(self, op: np.ndarray) -> float:
        m1 = self.expectation(op)
        m2 = self.expectation(op @ op)
        return float(np.real(m2) - np.real(m1) ** 2)

    def purity(self) -> float:
        if self._ket is not None:
            return float(np.real(np.vdot(self._ket, self._ket)) ** 2)
        return float(np.real(np.einsum("ij,ji->", self._rho, self._rho)))

    def trace(self) -> float:
        if self._ket is not None:
            return float(np.real(np.vdot(self._ket, self._ket)))
        return float(np.real(np.trace(self._rho)))

    def fock_populations(self) -> np.ndarray:
        if self._ket is not None:
            return np.abs(self._ket) ** 2
        return np.real(np.diag(self._rho)).copy()

    def validate_positivity(self, floor: float = -1e-8):
        evals = np.linalg.eigvalsh(self.rho)
        if evals.min() < floor:
            raise ValueError(f"negative eigenvalue {evals.min():.2e}")
        return self


def expectation(state: QuantumState, op: np.ndarray) -> complex:
    """tr(rho op) (or the pure-state matrix element)."""
    return state.expectation(op)


def variance(state: QuantumState, op: np.ndarray) -> float:
    """<op^2> - <op>^2 for a Hermitian observable."""
    return state.variance(op)


def squeezing_from_variance(state: QuantumState) -> float:
    """Squeezing parameter r = -log(Var(p) / V0) / 2 with V0 = 1/2."""
    ops = ladder_ops(state.dim)
    return float(-0.5 * np.log(state.variance(ops.p) / 0.5))


def rotate(state: QuantumState, theta: float) -> QuantumState:
    """Phase-space rotation exp(-i theta n): <a> -> <a> exp(-i theta)."""
    phases = np.exp(-1j * theta * np.arange(state.dim))
    if state.is_pure:
        return QuantumState(state.dim, ket=phases * state.ket)
    rho = (phases[:, None] * state.rho) * phases.conj()[None, :]
    return QuantumState(state.dim, rho=rho)


def displacement_operator(dim: int, beta: complex) -> np.ndarray:
    ops = ladder_ops(dim)
    return expm(beta * ops.adag - np.conj(beta) * ops.a)


def displace(state: QuantumState, beta: complex) -> QuantumState:
    """Apply the displacement unitary D(beta) = exp(beta adag - beta* a).

    Raises:
        TruncationLeak: if |beta|^2 exceeds dim/10, where the truncated
            displacement operator stops being reliably unitary.
    """
    if abs(beta) ** 2 > state.dim / 10:
        raise TruncationLeak(
            f"|beta|^2 = {abs(beta)**2:.2f} exceeds dim/10 = {state.dim / 10}")
    D = displacement_operator(state.dim, beta)
    if state.is_pure:
        return QuantumState(state.dim, ket=D @ state.ket)
    return QuantumState(state.dim, rho=D @ state.rho @ D.conj().T)


class TimeDependentHamiltonian:
    """Sum of constant Hermitian operators weighted by real scalar envelopes.

    ``terms`` is a list of (matrix, envelope) pairs; an envelope of None means
    the matrix enters statically.  All matrices must share one dimension and
    be Hermitian to 1e-12 (relative to their own scale).
    """

    def __init__(self, terms: Sequence[tuple]):
        if not terms:
            raise ValueError("need at least one term")
        self.dim = terms[0][0].shape[0]
        static = np.zeros((self.dim, self.dim), dtype=complex)
        dynamic = []
        for op, env in terms:
            op = np.asarray(op, dtype=complex)
            _check_dims(self.dim, op)
            scale = max(np.max(np.abs(op)), 1.0)
            if np.max(np.abs(op - op.conj().T)) > 1e-12 * scale:
                raise ValueError("Hamiltonian term is not Hermitian")
            if env is None:
                static += op
            else:
                dynamic.append((op, env))
        self.static = static
        self.dynamic = dynamic

    def matrix(self, t: float) -> np.ndarray:
        """Assembled H(t)."""
        out = self.static.copy()
        for op, env in self.dynamic:
            out += float(env(t)) * op
        return out


def build_snail_hamiltonian(couplings: CouplingSet, drive: Callable,
                            dim: int,
                            include_linear_drive: bool = False
                            ) -> TimeDependentHamiltonian:
    """Full nonlinear-resonator Hamiltonian under a flux modulation.

        H(t) = omega_r n + sum_m [g_dc_m + g_lin_m phi(t) + g_quad_m phi(t)^2]
               * (a + adag)^m

    ``drive`` is the scalar flux modulation phi(t) (dimensionless, |phi|<<1).
    The m = 1 linear-in-drive term is dropped unless ``include_linear_drive``
    is set: that term is assumed cancelled by a compensating displacement
    drive, while the quadratic-in-drive m = 1 term is kept.
    """
    ops = ladder_ops(dim)
    m_max = couplings.m_max
    powers = {1: ops.a + ops.adag}
    for m in range(2, m_max + 1):
        powers[m] = powers[m - 1] @ powers[1]

    static = couplings.omega_r * ops.n
    for m in range(3, m_max + 1):
        static = static + couplings.g_dc[m] * powers[m]

    lin = np.zeros((dim, dim), dtype=complex)
    start = 1 if include_linear_drive else 2
    for m in range(start, m_max + 1):
        lin = lin + couplings.g_ac_lin[m] * powers[m]
    quad = np.zeros((dim, dim), dtype=complex)
    for m in range(1, m_max + 1):
        quad = quad + couplings.g_ac_quad[m] * powers[m]

    return TimeDependentHamiltonian([
        (static, None),
        (lin, drive),
        (quad, lambda t: drive(t) ** 2),
    ])


@dataclass
class LindbladConfig:
    """Loss rate and integrator controls.

    ``max_step`` bounds the adaptive step so fast drive tones stay resolved;
    None leaves the controller free.
    """

    kappa: float = 0.0
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: Optional[float] = None
    n_samples: int = 200
    method: str = "DOP853"

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")


@dataclass
class IntegrationResult:
    """Final state plus sampled scalar observables along the trajectory."""

    final: QuantumState
    times: np.ndarray
    observables: dict = field(default_factory=dict)
    nfev: int = 0

    def observable_table(self) -> np.ndarray:
        cols = [self.times * 1e9] + [self.observables[k] for k in
                                     ("q_mean", "p_mean", "var_q", "var_p",
                                      "n_mean", "purity")]
        return np.column_stack(cols)


def _observables_from_columns(dim, cols, pure):
    ops = ladder_ops(dim)
    q, p, n = ops.q, ops.p, ops.n
    q2, p2 = q @ q, p @ p
    out = {k: [] for k in ("q_mean", "p_mean", "var_q", "var_p", "n_mean",
                           "purity", "trace")}
    for y in cols:
        if pure:
            st = QuantumState(dim, ket=y)
        else:
            st = QuantumState(dim, rho=y.reshape(dim, dim))
        eq, ep = np.real(st.expectation(q)), np.real(st.expectation(p))
        out["q_mean"].append(eq)
        out["p_mean"].append(ep)
        out["var_q"].append(np.real(st.expectation(q2)) - eq**2)
        out["var_p"].append(np.real(st.expectation(p2)) - ep**2)
        out["n_mean"].append(np.real(st.expectation(n)))
        out["purity"].append(st.purity())
        out["trace"].append(st.trace())
    return {k: np.asarray(v) for k, v in out.items()}


def check_truncation(state: QuantumState, top_fraction: float = 0.1,
                     tol: float = 1e-4):
    """Raise TruncationLeak if the top Fock levels hold too much population."""
    pops = state.fock_populations()
    k = max(1, int(np.floor(state.dim * top_fraction)))
    leaked = float(pops[-k:].sum())
    if leaked > tol:
        raise TruncationLeak(
            f"top {k} of {state.dim} levels hold population {leaked:.2e} "
            f"(> {tol}); increase dim")
    return leaked


def integrate(ham: TimeDependentHamiltonian, cfg: LindbladConfig,
              state0: QuantumState, t_span,
              sample_observables: bool = True,
              force_density_matrix: bool = False) -> IntegrationResult:
    """Evolve ``state0`` under H(t) with single-photon loss ``cfg.kappa``.

    Pure initial states with kappa = 0 are integrated as kets unless
    ``force_density_matrix`` is set.  The final state is checked for
    truncated-basis leakage (top 10% of levels above 1e-4 population).

    Raises:
        IntegratorFailure: on solver failure or step-size collapse.
        TruncationLeak: if the final state leaked into the top of the basis.
    """
    dim = ham.dim
    if state0.dim != dim:
        raise DimensionMismatch(
            f"state dim {state0.dim} != Hamiltonian dim {dim}")
    t0, t1 = float(t_span[0]), float(t_span[1])
    use_ket = state0.is_pure and cfg.kappa == 0.0 and not force_density_matrix

    H_static = ham.static
    dynamic = ham.dynamic

    if use_ket:
        def rhs(t, y):
            hy = H_static @ y
            for op, env in dynamic:
                hy += float(env(t)) * (op @ y)
            return -1j * hy

        y0 = state0.ket.astype(complex)
    else:
        kappa = cfg.kappa
        sq = np.sqrt(np.arange(1.0, dim))
        loss_weight = np.outer(sq, sq)              # a rho adag stencil
        n_diag = np.arange(dim, dtype=float)
        n_sum = n_diag[:, None] + n_diag[None, :]   # {n, rho} stencil

        def rhs(t, y):
            rho = y.reshape(dim, dim)
            H = H_static.copy()
            for op, env in dynamic:
                H += float(env(t)) * op
            hr = H @ rho
            drho = -1j * (hr - hr.conj().T)         # rho Hermitian: rho H = (H rho)^dag
            if kappa:
                drho[:-1, :-1] += (kappa * loss_weight) * rho[1:, 1:]
                drho -= (0.5 * kappa) * (n_sum * rho)
            return drho.ravel()

        y0 = state0.rho.astype(complex).ravel()

    t_eval = None
    if sample_observables and cfg.n_samples > 1:
        t_eval = np.linspace(t0, t1, cfg.n_samples)

    sol = solve_ivp(rhs, (t0, t1), y0, method=cfg.method, rtol=cfg.rtol,
                    atol=cfg.atol, t_eval=t_eval,
                    max_step=cfg.max_step or np.inf)
    if not sol.success:
        raise IntegratorFailure(f"solver failed: {sol.message}")

    yf = sol.y[:, -1]
    if use_ket:
        final = QuantumState(dim, ket=yf)
    else:
        rho_f = yf.reshape(dim, dim)
        final = QuantumState(dim, rho=0.5 * (rho_f + rho_f.conj().T))

    observables = {}
    times = sol.t
    if sample_observables:
        observables = _observables_from_columns(dim, sol.y.T, use_ket)
    check_truncation(final)
    return IntegrationResult(final=final, times=times,
                             observables=observables, nfev=sol.nfev)


def trajectory_to_csv(result: IntegrationResult, path):
    """Write (t_ns, <q>, <p>, Var q, Var p, <n>, purity) rows."""
    header = "t_ns,q_mean,p_mean,var_q,var_p,n_mean,purity"
    np.savetxt(path, result.observable_table(), delimiter=",",
               header=header, comments="")
