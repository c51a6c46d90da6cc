"""SNAIL inductive potential and its Taylor expansion.

A SNAIL is a loop of ``n`` large Josephson junctions (energy ``E_J`` each)
shunted by a single smaller junction (energy ``alpha * E_J``), threaded by an
external magnetic flux.  Everything here works in dimensionless phase
``phi = Phi / phi0`` (``phi0 = hbar / 2e`` the reduced flux quantum) and in
angular-frequency energy units (``hbar = 1``), so the normalized potential is

    U(phi) / E_J = -alpha cos(phi) - n cos((phi_ext - phi) / n).

The expansion of ``U`` around its static minimum yields static coefficients
``c_m`` and, once the external flux acquires a small ac modulation, additional
coefficients linear and quadratic in the modulation amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .errors import NoMinimumFound, NoRootInInterval

# reduced flux quantum hbar / 2e in Wb, and hbar, used to convert junction
# inductance to Josephson energy in angular-frequency units
HBAR = 1.054571817e-34
PHI0 = HBAR / (2 * 1.602176634e-19)


def josephson_energy_from_inductance(l_j: float) -> float:
    """Josephson energy E_J = phi0^2 / L_J, in angular-frequency units."""
    return PHI0**2 / l_j / HBAR


@dataclass(frozen=True)
class SnailParams:
    """Microscopic SNAIL description.

    Attributes:
        n: number of large junctions in the array arm.
        alpha: energy ratio of the small shunt junction (0 < alpha < 1).
        e_j: Josephson energy of one large junction, angular-frequency units.
        phi_ext_dc: static reduced external flux in radians, stored reduced
            to the canonical branch [0, 2*pi*n).
    """

    n: int
    alpha: float
    e_j: float
    phi_ext_dc: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.e_j <= 0:
            raise ValueError(f"e_j must be positive, got {self.e_j}")
        period = 2 * np.pi * self.n
        object.__setattr__(self, "phi_ext_dc", float(self.phi_ext_dc) % period)

    @classmethod
    def from_inductance(cls, n, alpha, l_j, phi_ext_dc):
        """Build from junction inductance L_J (in henry) instead of E_J."""
        return cls(n=n, alpha=alpha,
                   e_j=josephson_energy_from_inductance(l_j),
                   phi_ext_dc=phi_ext_dc)

    def with_flux(self, phi_ext_dc: float) -> "SnailParams":
        return replace(self, phi_ext_dc=phi_ext_dc)


@dataclass(frozen=True)
class TaylorCoeffs:
    """Dimensionless expansion coefficients of the effective potential.

    Arrays are indexed by the expansion order m, entry 0 unused.  ``c_dc[m]``
    multiplies phi^m / m! in the static potential.  ``c_ac_lin[m]`` and
    ``c_ac_quad[m]`` are the amplitudes of the contributions linear and
    quadratic in the ac flux modulation (per unit modulation and per unit
    squared modulation respectively).
    """

    c_dc: np.ndarray
    c_ac_lin: np.ndarray
    c_ac_quad: np.ndarray
    m_max: int = field(default=4)


def potential_eval(params: SnailParams, phi):
    """Inductive energy at phase ``phi``, in angular-frequency units.

    Accepts scalar or array ``phi`` (dimensionless phase across the small
    junction).
    """
    return params.e_j * (
        -params.alpha * np.cos(phi)
        - params.n * np.cos((params.phi_ext_dc - phi) / params.n)
    )


def _stationarity(params: SnailParams, phi):
    """d(U/E_J)/dphi: alpha sin(phi) - sin((phi_ext - phi)/n)."""
    return params.alpha * np.sin(phi) - np.sin(
        (params.phi_ext_dc - phi) / params.n)


def _curvature(params: SnailParams, phi):
    """d2(U/E_J)/dphi2."""
    return params.alpha * np.cos(phi) + np.cos(
        (params.phi_ext_dc - phi) / params.n) / params.n


def find_minimum(params: SnailParams, n_scan: int = 4001) -> float:
    """Locate the potential minimum on the adiabatic branch.

    Scans one full flux period centred on the applied flux for sign changes
    of the stationarity condition, bisects each bracket, keeps the roots with
    positive curvature and returns the one nearest the zero-flux minimum
    (phi = 0).  A Newton polish brings the residual below 1e-12.

    Raises:
        NoMinimumFound: if no positive-curvature root is bracketed.
    """
    half = np.pi * params.n
    xs = np.linspace(params.phi_ext_dc - half, params.phi_ext_dc + half, n_scan)
    vals = _stationarity(params, xs)
    roots = []
    for i in range(n_scan - 1):
        if vals[i] == 0.0:
            if _curvature(params, xs[i]) > 0:
                roots.append(xs[i])
            continue
        if vals[i] * vals[i + 1] < 0:
            r = brentq(lambda p: _stationarity(params, p),
                       xs[i], xs[i + 1], xtol=1e-14, rtol=8.9e-16)
            if _curvature(params, r) > 0:
                roots.append(r)
    if not roots:
        raise NoMinimumFound(
            f"no potential minimum bracketed for {params}")
    phi_min = min(roots, key=abs)
    # Newton polish; curvature is bounded away from zero at a true minimum
    for _ in range(4):
        phi_min -= _stationarity(params, phi_min) / _curvature(params, phi_min)
    if abs(_stationarity(params, phi_min)) > 1e-12:
        raise NoMinimumFound(
            f"stationarity residual {abs(_stationarity(params, phi_min)):.2e} "
            "did not converge below 1e-12")
    return float(phi_min)


def _cos_cycle(x: float, k: int) -> float:
    """k-th derivative of cos evaluated at x: cycles cos, -sin, -cos, sin."""
    return (np.cos(x), -np.sin(x), -np.cos(x), np.sin(x))[k % 4]


def _dc_coeff(params: SnailParams, phi_min: float, m: int) -> float:
    """m-th phase derivative of U/E_J at the minimum, in closed form.

    Both cosine branches cycle through +-sin/+-cos under differentiation;
    the array branch picks up a factor n^(1-m) and alternating sign from the
    inner derivative.
    """
    u = (params.phi_ext_dc - phi_min) / params.n
    t_small = -params.alpha * _cos_cycle(phi_min, m)
    t_array = -params.n * _cos_cycle(u, m) * (-1.0 / params.n) ** m
    return float(t_small + t_array)


def static_coeffs(params: SnailParams, m_max: int = 4) -> TaylorCoeffs:
    """Static Taylor coefficients c_dc[m], m = 1..m_max, about the minimum.

    ``c_dc[1]`` vanishes to solver tolerance by construction.  The ac arrays
    of the returned struct are zero; see :func:`ac_coeff_amplitudes`.
    """
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    phi_min = find_minimum(params)
    c = np.zeros(m_max + 1)
    for m in range(1, m_max + 1):
        c[m] = _dc_coeff(params, phi_min, m)
    return TaylorCoeffs(c_dc=c, c_ac_lin=np.zeros(m_max + 1),
                        c_ac_quad=np.zeros(m_max + 1), m_max=m_max)


def ac_coeff_amplitudes(params: SnailParams, m_max: int = 4,
                        resonant_only: bool = False) -> TaylorCoeffs:
    """Modulation-induced coefficient amplitudes to second order.

    With the external flux split as phi_ext_dc + phi_ac(t) (|phi_ac| << 1),
    each coefficient becomes c_m(t) = c_dc[m] + c_ac_lin[m] * phi_ac
    + c_ac_quad[m] * phi_ac^2.  Closed forms follow from expanding the array
    branch of the potential in phi_ac/n; writing u = (phi_ext_dc - phi_min)/n:

        c_ac_lin[1]  = -cos(u)/n        c_ac_quad[1] = +sin(u)/(2 n^2)
        c_ac_lin[2]  = -sin(u)/n^2      c_ac_quad[2] = -cos(u)/(2 n^3)
        c_ac_lin[3]  = +cos(u)/n^3      c_ac_quad[3] = -sin(u)/(2 n^4)
        c_ac_lin[4]  = +sin(u)/n^4      c_ac_quad[4] = +cos(u)/(2 n^5)

    so c_ac_lin[3] = -c_ac_lin[1]/n^2 and c_ac_quad[4] = -c_ac_quad[2]/n^2
    hold identically.  Under a two-tone drive at the mode frequency and its
    third harmonic only the odd-order linear and even-order quadratic entries
    select resonant processes; pass ``resonant_only=True`` to zero the
    remaining (off-resonant) entries, which is the appropriate input for
    rotating-frame models.  The full set drives lab-frame simulations.
    """
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    phi_min = find_minimum(params)
    u = (params.phi_ext_dc - phi_min) / params.n
    lin, quad = _ac_amplitudes_from_u(params.n, u, m_max)
    if resonant_only:
        for m in range(1, m_max + 1):
            if m % 2 == 0:
                lin[m] = 0.0
            else:
                quad[m] = 0.0
    return TaylorCoeffs(c_dc=np.zeros(m_max + 1), c_ac_lin=lin,
                        c_ac_quad=quad, m_max=m_max)


def _ac_amplitudes_from_u(n: int, u: float, m_max: int):
    """Amplitude formulas as functions of u = (phi_ext_dc - phi_min) / n.

    The m-th phase derivative combined with one (two) further derivatives in
    the drive advances the array-branch trig cycle by m+1 (m+2) steps, so
    raising m by two flips the sign and divides by n^2.  Entries beyond
    m = 2 are built through that recurrence, which makes identities like
    c_ac_lin[3] = -c_ac_lin[1]/n^2 hold by construction.
    """
    lin = np.zeros(m_max + 1)
    quad = np.zeros(m_max + 1)
    cos_u, sin_u = np.cos(u), np.sin(u)
    n2 = float(n * n)
    lin[1] = -cos_u / n
    quad[1] = sin_u / (2 * n2)
    if m_max >= 2:
        lin[2] = -sin_u / n2
        quad[2] = -cos_u / (2 * n2 * n)
    for m in range(3, m_max + 1):
        lin[m] = -lin[m - 2] / n2
        quad[m] = -quad[m - 2] / n2
    return lin, quad


def expand_potential(params: SnailParams, m_max: int = 4,
                     resonant_only: bool = False) -> TaylorCoeffs:
    """Full coefficient set: static and modulation amplitudes together."""
    dc = static_coeffs(params, m_max)
    ac = ac_coeff_amplitudes(params, m_max, resonant_only=resonant_only)
    return TaylorCoeffs(c_dc=dc.c_dc, c_ac_lin=ac.c_ac_lin,
                        c_ac_quad=ac.c_ac_quad, m_max=m_max)


def kerr_free_flux(params: SnailParams, search_interval, n_scan: int = 2001,
                   xtol: float = 1e-10) -> float:
    """Flux at which the bare quartic coefficient c_dc[4] crosses zero.

    Args:
        params: SNAIL parameters; the stored flux is ignored.
        search_interval: (lo, hi) reduced fluxes in radians, within one period.

    Returns:
        The bracketed root of c_dc[4] as a function of applied flux, refined
        to ``xtol``.

    Raises:
        NoRootInInterval: if c_dc[4] does not change sign on the interval.
    """
    lo, hi = search_interval
    if not hi > lo:
        raise ValueError("search interval must satisfy hi > lo")

    def c4_at(phi_ext):
        p = params.with_flux(phi_ext)
        return _dc_coeff(p, find_minimum(p), 4)

    xs = np.linspace(lo, hi, n_scan)
    vals = np.array([c4_at(x) for x in xs])
    sign_change = np.nonzero(vals[:-1] * vals[1:] < 0)[0]
    if len(sign_change) == 0:
        raise NoRootInInterval(
            f"c4 has constant sign on [{lo}, {hi}]")
    i = sign_change[0]
    return float(brentq(c4_at, xs[i], xs[i + 1], xtol=xtol))
