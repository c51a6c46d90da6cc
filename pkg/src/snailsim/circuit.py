"""Resonator + SNAIL normal mode and quantized coupling strengths.

A quarter-wavelength transmission-line resonator (bare frequency ``omega_0``,
characteristic impedance ``Z_c``) is terminated by an array of ``M`` SNAILs.
The linearized boundary condition yields a transcendental equation for the
dressed mode frequency,

    omega_r * tan(pi/2 * omega_r/omega_0) = Z_c * c2 / (M * L_J),

and the zero-point phase amplitude at the SNAIL position follows from the
mode normalization.  Expansion coefficients of the SNAIL potential then map
onto Hamiltonian couplings

    g_m = E_J * phi_zpf^m * c_m / (m! * M^(m-1)).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidStiffness
from .snail import HBAR, PHI0, SnailParams, TaylorCoeffs, expand_potential

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class ResonatorParams:
    """Bare resonator description.

    Attributes:
        omega_0: bare angular resonance frequency (rad/s).
        z_c: characteristic impedance (ohm).
        m_snails: number of SNAILs in the terminating array.
    """

    omega_0: float
    z_c: float
    m_snails: int = 1

    def __post_init__(self):
        if self.omega_0 <= 0:
            raise ValueError("omega_0 must be positive")
        if self.z_c <= 0:
            raise ValueError("z_c must be positive")
        if int(self.m_snails) != self.m_snails or self.m_snails < 1:
            raise ValueError("m_snails must be a positive integer")


@dataclass(frozen=True)
class ModeSolution:
    """Dressed mode frequency plus normalization data.

    ``eta`` is the dimensionless mode-overlap factor
    (1/d) * integral cos^2(kx) dx = (1 + sin(2kd)/(2kd)) / 2 and ``phi_zpf``
    the dimensionless zero-point phase amplitude at the SNAIL position.
    """

    omega_r: float
    eta: float
    phi_zpf: float


@dataclass(frozen=True)
class CouplingSet:
    """Quantized Hamiltonian couplings, all in angular-frequency units.

    Arrays indexed by order m (entry 0 unused).  ``g_dc[m]`` multiplies
    (a + adag)^m statically (m = 3, 4; the quadratic part is already inside
    omega_r).  ``g_ac_lin[m]`` and ``g_ac_quad[m]`` multiply the same power
    per unit flux modulation and per unit squared modulation.
    """

    omega_r: float
    g_dc: np.ndarray
    g_ac_lin: np.ndarray
    g_ac_quad: np.ndarray

    @property
    def m_max(self) -> int:
        return len(self.g_dc) - 1


def solve_eigenmode(res: ResonatorParams, c2_dc: float, l_j: float,
                    rel_tol: float = 1e-9) -> float:
    """Smallest positive root of the dressed-mode equation on (0, omega_0).

    Bisection on a bracket that avoids the tangent pole at omega_0, followed
    by a Newton polish.

    Raises:
        InvalidStiffness: if ``c2_dc`` or ``l_j`` is not positive.
    """
    if c2_dc <= 0:
        raise InvalidStiffness(f"quadratic coefficient must be positive, "
                               f"got {c2_dc}")
    if l_j <= 0:
        raise InvalidStiffness(f"junction inductance must be positive, "
                               f"got {l_j}")
    w0 = res.omega_0
    rhs = res.z_c * c2_dc / (res.m_snails * l_j)

    def f(w):
        return w * np.tan(np.pi / 2 * w / w0) - rhs

    eps = 1e-6 * w0
    w = brentq(f, eps, w0 - eps, xtol=1e-9 * w0, rtol=8.9e-16)
    # Newton polish against the analytic derivative
    for _ in range(3):
        x = np.pi / 2 * w / w0
        df = np.tan(x) + w * (np.pi / 2 / w0) / np.cos(x) ** 2
        w -= f(w) / df
    if abs(f(w)) > rel_tol * abs(rhs):
        raise InvalidStiffness(
            f"eigenmode residual {abs(f(w)) / abs(rhs):.2e} above {rel_tol}")
    return float(w)


def mode_normalization(res: ResonatorParams, omega_r: float) -> ModeSolution:
    """Mode overlap factor and zero-point phase at the SNAIL position.

    With kd = (pi/2) * (omega_r / omega_0), the cosine-mode overlap is
    eta = (1 + sin(2kd)/(2kd)) / 2 and

        phi_zpf = cos(kd) / phi0 * sqrt(2 Z_c hbar / (pi x + sin(pi x))),

    x = omega_r / omega_0.  Both symbols in the frequency ratio refer to the
    bare resonance; this choice is validated by the coupling regression."""
    x = omega_r / res.omega_0
    kd = np.pi / 2 * x
    eta = 0.5 * (1 + np.sinc(2 * kd / np.pi))  # sinc(y/pi) = sin(y)/y
    phi_zpf = (np.cos(kd) / PHI0
               * np.sqrt(2 * res.z_c * HBAR / (np.pi * x + np.sin(np.pi * x))))
    return ModeSolution(omega_r=float(omega_r), eta=float(eta),
                        phi_zpf=float(phi_zpf))


def compute_couplings(snail: SnailParams, res: ResonatorParams,
                      coeffs: TaylorCoeffs, mode: ModeSolution) -> CouplingSet:
    """Map expansion coefficients onto quantized coupling strengths.

    The m = 1, 2 static parts are excluded: the linear one vanishes at the
    minimum and the quadratic one is already absorbed into ``omega_r``.
    """
    m_max = coeffs.m_max
    phi = mode.phi_zpf
    M = res.m_snails

    def g(m, c):
        return snail.e_j * phi**m * c / (factorial(m) * M ** (m - 1))

    g_dc = np.zeros(m_max + 1)
    for m in range(3, m_max + 1):
        g_dc[m] = g(m, coeffs.c_dc[m])
    g_lin = np.zeros(m_max + 1)
    g_quad = np.zeros(m_max + 1)
    for m in range(1, m_max + 1):
        g_lin[m] = g(m, coeffs.c_ac_lin[m])
        g_quad[m] = g(m, coeffs.c_ac_quad[m])
    return CouplingSet(omega_r=mode.omega_r, g_dc=g_dc,
                       g_ac_lin=g_lin, g_ac_quad=g_quad)


def effective_cubic_drive(couplings: CouplingSet, lam: float) -> float:
    """Rotating-frame-resonant cubic amplitude under the two-tone drive.

    The drive lam * [cos(w t) + cos(3 w t)] selects the full cubic power
    resonantly; each cosine contributes half its amplitude to the co-rotating
    term, so the effective coupling is g_ac_lin[3] * lam / 2.
    """
    return float(couplings.g_ac_lin[3] * lam / 2)


def derive_couplings(snail: SnailParams, res: ResonatorParams, l_j: float,
                     m_max: int = 4):
    """Full chain from microscopic parameters to the coupling set.

    Returns:
        (coeffs, mode, couplings)
    """
    coeffs = expand_potential(snail, m_max=m_max)
    omega_r = solve_eigenmode(res, coeffs.c_dc[2], l_j)
    mode = mode_normalization(res, omega_r)
    return coeffs, mode, compute_couplings(snail, res, coeffs, mode)


def couplings_report(couplings: CouplingSet,
                     cancel_linear_drive: bool = True) -> dict:
    """Coupling table as ordinary frequencies in MHz (nu = omega / 2 pi).

    The m = 1 linear-in-drive entry is reported as zero by default: that
    drive term is assumed cancelled by a compensating displacement from an
    external current source.
    """
    mhz = TWO_PI * 1e6
    lin1 = 0.0 if cancel_linear_drive else couplings.g_ac_lin[1] / mhz
    rep = {
        "omega_r_ghz": couplings.omega_r / (TWO_PI * 1e9),
        "g_dc_mhz": {str(m): couplings.g_dc[m] / mhz
                     for m in range(3, couplings.m_max + 1)},
        "g_ac_lin_mhz": {"1": lin1},
        "g_ac_quad_mhz": {},
    }
    for m in range(2, couplings.m_max + 1):
        rep["g_ac_lin_mhz"][str(m)] = couplings.g_ac_lin[m] / mhz
    for m in range(1, couplings.m_max + 1):
        rep["g_ac_quad_mhz"][str(m)] = couplings.g_ac_quad[m] / mhz
    if cancel_linear_drive:
        rep["notes"] = ["g_ac_lin[1] set to zero: assumed cancelled by a "
                        "compensating resonant displacement drive"]
    return rep
