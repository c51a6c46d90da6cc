"""Continuous-variable gate set and commutator-composition synthesis.

The elementary gate set is

    { e^{i q s1},  e^{i s2 (qp + pq)},  e^{i (p_k q_l - q_k p_l)},
      e^{i pi/4 (q^2 + p^2)},  e^{i gamma q^3} }

(displacement, squeeze, beam splitter, Fourier, cubic).  Composing group
commutators

    e^{iA dt} e^{iB dt} e^{-iA dt} e^{-iB dt} = e^{-[A,B] dt^2} + O(dt^3)

lifts this set to arbitrary polynomial generators: commuting with the cubic
raises the polynomial degree while Gaussian generators lower or preserve it.
All unitaries are exact matrix exponentials on the truncated space; defect
norms are always restricted to the lowest Fock levels, where truncation does
not corrupt the comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import ceil, sqrt

import numpy as np
from scipy.linalg import expm

from .errors import BudgetExceeded, DimensionMismatch, UnsupportedModeCount
from .fock import ladder_ops

GATE_KINDS = ("displacement", "squeeze", "beam_splitter", "fourier", "cubic")
TWO_MODE_DIM_CAP = 20


@dataclass(frozen=True)
class GateSpec:
    """One elementary gate.

    parameter: s1, s2 or gamma for the parametric gates; an integer number
    of quarter turns for ``fourier`` (negative = inverse) and an angle
    multiplier for ``beam_splitter``.
    modes: target mode indices (two distinct ones for the beam splitter).
    """

    kind: str
    parameter: float = 1.0
    modes: tuple = (0,)

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if not np.isfinite(self.parameter):
            raise ValueError("gate parameter must be finite")
        if self.kind == "beam_splitter" and (
                len(self.modes) != 2 or self.modes[0] == self.modes[1]):
            raise ValueError("beam_splitter needs two distinct modes")

    def inverse(self) -> "GateSpec":
        return GateSpec(self.kind, -self.parameter, self.modes)


def _embed(op: np.ndarray, mode: int, dim: int, n_modes: int) -> np.ndarray:
    if n_modes == 1:
        return op
    eye = np.eye(dim, dtype=complex)
    return np.kron(op, eye) if mode == 0 else np.kron(eye, op)


def gate_unitary(gate: GateSpec, dim: int, n_modes: int = 1) -> np.ndarray:
    """Exact matrix exponential of the gate generator on the truncated space."""
    if n_modes not in (1, 2):
        raise UnsupportedModeCount(f"n_modes = {n_modes}; supported: 1, 2")
    if n_modes == 2 and dim > TWO_MODE_DIM_CAP:
        raise ValueError(
            f"two-mode registers are capped at dim {TWO_MODE_DIM_CAP} "
            "per mode to keep Kronecker products tractable")
    if max(gate.modes) >= n_modes:
        raise UnsupportedModeCount(
            f"gate addresses mode {max(gate.modes)} in a "
            f"{n_modes}-mode register")
    ops = ladder_ops(dim)
    s = gate.parameter
    if gate.kind == "displacement":
        gen = s * _embed(ops.q, gate.modes[0], dim, n_modes)
    elif gate.kind == "squeeze":
        qp = ops.q @ ops.p + ops.p @ ops.q
        gen = s * _embed(qp, gate.modes[0], dim, n_modes)
    elif gate.kind == "cubic":
        gen = s * _embed(ops.q @ ops.q @ ops.q, gate.modes[0], dim, n_modes)
    elif gate.kind == "fourier":
        gen = (s * np.pi / 4) * _embed(ops.q @ ops.q + ops.p @ ops.p,
                                       gate.modes[0], dim, n_modes)
    else:  # beam_splitter
        if n_modes != 2:
            raise UnsupportedModeCount("beam_splitter needs a 2-mode register")
        k, l = gate.modes
        pk = _embed(ops.p, k, dim, 2)
        ql = _embed(ops.q, l, dim, 2)
        qk = _embed(ops.q, k, dim, 2)
        pl = _embed(ops.p, l, dim, 2)
        gen = s * (pk @ ql - qk @ pl)
    return expm(1j * gen)


@dataclass
class GateSequence:
    """Ordered gate list; gates[0] acts first."""

    gates: list = field(default_factory=list)
    n_modes: int = 1

    def __len__(self):
        return len(self.gates)

    def inverse(self) -> "GateSequence":
        return GateSequence([g.inverse() for g in reversed(self.gates)],
                            self.n_modes)

    def extend(self, other: "GateSequence"):
        self.gates.extend(other.gates)

    def unitary(self, dim: int) -> np.ndarray:
        # synthesized sequences repeat a few distinct gates thousands of
        # times; cache their exponentials
        d = dim if self.n_modes == 1 else dim * dim
        U = np.eye(d, dtype=complex)
        cache = {}
        for g in self.gates:
            key = (g.kind, g.parameter, g.modes)
            if key not in cache:
                cache[key] = gate_unitary(g, dim, self.n_modes)
            U = cache[key] @ U
        return U

    def to_json(self) -> str:
        recs = [{"kind": g.kind, "parameter": g.parameter,
                 "modes": list(g.modes)} for g in self.gates]
        return json.dumps({"schema": "snailsim/gate-sequence-v1",
                           "n_modes": self.n_modes, "gates": recs},
                          indent=2, sort_keys=True)


def commutator_compose(A: np.ndarray, B: np.ndarray, dt: float) -> np.ndarray:
    """Group commutator e^{iA dt} e^{iB dt} e^{-iA dt} e^{-iB dt}.

    For Hermitian A, B this equals e^{-[A, B] dt^2} up to O(dt^3).
    """
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} vs {B.shape}")
    Ua = expm(1j * dt * A)
    Ub = expm(1j * dt * B)
    return Ua @ Ub @ Ua.conj().T @ Ub.conj().T


def commutator_exact(A: np.ndarray, B: np.ndarray, dt: float) -> np.ndarray:
    """The limit target e^{-[A,B] dt^2} (anti-Hermitian exponent, unitary)."""
    return expm(-(A @ B - B @ A) * dt * dt)


def low_level_defect(U: np.ndarray, V: np.ndarray, levels: int) -> float:
    """Operator 2-norm of (U - V) restricted to the lowest Fock levels."""
    d = (U - V)[:levels, :levels]
    return float(np.linalg.norm(d, ord=2))


def compose_defect(A: np.ndarray, B: np.ndarray, dt: float,
                   levels: int | None = None) -> float:
    """Defect of the group commutator against its dt^2 limit."""
    levels = levels or A.shape[0] // 2
    return low_level_defect(commutator_compose(A, B, dt),
                            commutator_exact(A, B, dt), levels)


# --- synthesis ---------------------------------------------------------------

def _cubic_block(gamma: float, base_cubicity: float) -> list:
    """e^{i gamma q^3} from the fixed-cubicity gate, rescaled by squeezing.

    Conjugating the cubic with e^{i s (qp+pq)} rescales q by e^{-2s}, hence
    the cubicity by e^{-6s}; a single gate suffices when |gamma| equals the
    hardware value.
    """
    if gamma == 0.0:
        return []
    sign = 1.0 if gamma > 0 else -1.0
    if abs(abs(gamma) - base_cubicity) < 1e-15:
        return [GateSpec("cubic", sign * base_cubicity)]
    s = -np.log(abs(gamma) / base_cubicity) / 6.0
    return [GateSpec("squeeze", s), GateSpec("cubic", sign * base_cubicity),
            GateSpec("squeeze", -s)]


def _p_displacement_block(s: float) -> list:
    """e^{i p s} = F e^{i q s} F^{-1} (Fourier maps q to p)."""
    return [GateSpec("fourier", -1), GateSpec("displacement", s),
            GateSpec("fourier", 1)]


def _group_commutator(block_a: list, block_b: list) -> list:
    """Gate list realizing e^{iA} e^{iB} e^{-iA} e^{-iB} ~ e^{-[A,B]}.

    Gate lists apply first-element-first, so the net operator product runs
    right to left: inverse-B first, block-A last.
    """
    seq_a = GateSequence(list(block_a))
    seq_b = GateSequence(list(block_b))
    return (seq_b.inverse().gates + seq_a.inverse().gates
            + seq_b.gates + seq_a.gates)


def _shear_block(b: float, reps: int, base_cubicity: float) -> list:
    """e^{i b q^2} from repeated [cubic, p-displacement] group commutators.

    Each repetition realizes e^{-3 i g0 s q^2} + O(third order) with the
    cubic kept at the fixed hardware strength g0.  Because q^3 commutes with
    the produced q^2, the leading third-order error term [A,[A,B]] vanishes
    and the total defect shrinks as 1/reps.
    """
    if b == 0.0:
        return []
    gates = []
    s = -b / (3.0 * base_cubicity * reps)
    block_a = [GateSpec("cubic", base_cubicity)]
    block_b = _p_displacement_block(s)
    for _ in range(reps):
        gates += _group_commutator(block_a, block_b)
    return gates


def _fourier_sandwich(inner: list) -> list:
    """Map a q-polynomial gate block to the same polynomial in p."""
    return ([GateSpec("fourier", -1)] + inner + [GateSpec("fourier", 1)])


def _quartic_block(c: float, outer_reps: int, inner_reps: int,
                   shear_reps: int, base_cubicity: float) -> list:
    """e^{i c q^4} by two nesting levels.

    Inner repetitions of [cubic(g1), p^2-gate(u)] accumulate
    e^{i g (q^2 p + p q^2)} with g = 3 g1 u inner_reps; outer repetitions of
    [cubic(g2), inner] then accumulate e^{i 6 g2 g q^4} per repetition.
    Strengths are balanced (g2 ~ g, g1 ~ u) so every elementary commutator
    stays weak.
    """
    if c == 0.0:
        return []
    # both cubics stay at the hardware strength; each commutator contributes
    # e^{-[A,B]}, so the driven strengths pick up one sign flip each
    g0 = base_cubicity
    g = -c / (outer_reps * 6.0 * g0)
    u = -g / (inner_reps * 3.0 * g0)

    p2_block = _fourier_sandwich(_shear_block(u, shear_reps, base_cubicity))
    inner = []
    cubic_gate = [GateSpec("cubic", g0)]
    for _ in range(inner_reps):
        inner += _group_commutator(cubic_gate, p2_block)
    gates = []
    for _ in range(outer_reps):
        gates += _group_commutator(cubic_gate, inner)
    return gates


def synthesize_polynomial(target: dict, dim: int, budget: int = 20000,
                          base_cubicity: float = 0.1, shear_reps: int = 60,
                          quartic_reps: tuple = (4, 4, 12),
                          defect_levels: int | None = None):
    """Approximate e^{i H} for a polynomial generator H using only set gates.

    Args:
        target: monomial coefficients keyed by (power of q, power of p);
            supported keys: (1,0), (2,0), (3,0), (4,0) and their pure-p
            counterparts, plus (1,1) meaning the symmetrized qp + pq.  Pure-q
            terms commute and are emitted as an exact product (only the q^2
            and q^4 factors require commutator approximation); likewise for
            pure p.  Mixed q/p sums are outside this version's scope.
        budget: maximum number of primitive gates.

    Returns:
        (GateSequence, defect) with the defect measured as the operator-norm
        difference to the exact exponential on the lowest ``defect_levels``
        Fock levels (default dim/2).

    Raises:
        BudgetExceeded: if the recipe needs more than ``budget`` gates.
    """
    target = {k: float(v) for k, v in target.items() if v}
    q_keys = {k for k in target if k[1] == 0 and k[0] > 0}
    p_keys = {k for k in target if k[0] == 0 and k[1] > 0}
    qp_key = {k for k in target if k == (1, 1)}
    if set(target) - q_keys - p_keys - qp_key:
        raise ValueError(
            f"unsupported monomials {sorted(set(target) - q_keys - p_keys - qp_key)}; "
            "supported: pure q, pure p (degree <= 4), and (1,1)")
    if sum(map(bool, (q_keys, p_keys, qp_key))) > 1:
        raise ValueError("non-commuting monomial mixes are not supported "
                         "in this version")
    if any(k[0] > 4 or k[1] > 4 for k in target):
        raise ValueError("degree must be at most 4")

    def q_gates(coeffs):
        gates = []
        if coeffs.get((4, 0)):
            o, i, s = quartic_reps
            gates += _quartic_block(coeffs[(4, 0)], o, i, s, base_cubicity)
        gates += _cubic_block(coeffs.get((3, 0), 0.0), base_cubicity)
        gates += _shear_block(coeffs.get((2, 0), 0.0), shear_reps,
                              base_cubicity)
        if coeffs.get((1, 0)):
            gates.append(GateSpec("displacement", coeffs[(1, 0)]))
        return gates

    gates = []
    if qp_key:
        gates.append(GateSpec("squeeze", target[(1, 1)]))
    elif q_keys:
        gates += q_gates(target)
    elif p_keys:
        flipped = {(j, 0): v for (i, j), v in target.items()}
        gates += _fourier_sandwich(q_gates(flipped))
    if len(gates) > budget:
        raise BudgetExceeded(
            f"recipe needs {len(gates)} gates, budget is {budget}")

    seq = GateSequence(gates)
    ops = ladder_ops(dim)
    gen = np.zeros((dim, dim), dtype=complex)
    for (i, j), v in target.items():
        if (i, j) == (1, 1):
            gen += v * (ops.q @ ops.p + ops.p @ ops.q)
        elif i:
            gen += v * np.linalg.matrix_power(ops.q, i)
        else:
            gen += v * np.linalg.matrix_power(ops.p, j)
    exact = expm(1j * gen)
    levels = defect_levels or dim // 2
    defect = low_level_defect(seq.unitary(dim), exact, levels)
    return seq, defect


def t_gate_target(dim: int) -> np.ndarray:
    """Reference non-Clifford gate for grid-encoded qubits.

    U = exp(i pi/4 [2 q^3 / pi^{3/2} + q^2 / pi - 2 q / sqrt(pi)]); the
    generator is a pure-q cubic polynomial, so the factors commute exactly.
    """
    ops = ladder_ops(dim)
    q = ops.q
    gen = (np.pi / 4) * (2.0 * np.linalg.matrix_power(q, 3) / np.pi**1.5
                         + (q @ q) / np.pi
                         - 2.0 * q / sqrt(np.pi))
    return expm(1j * gen)


def t_gate_coefficients() -> dict:
    """Monomial coefficients of the reference gate generator."""
    return {(3, 0): np.pi / 4 * 2.0 / np.pi**1.5,
            (2, 0): np.pi / 4 / np.pi,
            (1, 0): -np.pi / 4 * 2.0 / sqrt(np.pi)}
