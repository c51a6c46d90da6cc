"""Shared fixtures; the expensive protocol runs are computed once per session."""

from types import SimpleNamespace

import pytest

from snailsim import (CubicProtocol, SqueezeProtocol, default_config,
                      derive_couplings, prepare_cubic_phase_state)


@pytest.fixture(scope="session")
def chain():
    """Reference-device coupling chain (fast, deterministic)."""
    cfg = default_config()
    coeffs, mode, couplings = derive_couplings(
        cfg.snail_params(), cfg.resonator_params(), cfg.l_j,
        cfg.sim["expansion_order"])
    return SimpleNamespace(cfg=cfg, coeffs=coeffs, mode=mode,
                           couplings=couplings)


def _protocols(chain):
    cfg = chain.cfg
    squeeze = SqueezeProtocol.for_target_displacement(
        cfg.squeeze["xi_eff"], chain.couplings.omega_r,
        cfg.squeeze["t_ns"] * 1e-9)
    cubic = CubicProtocol.for_couplings(
        chain.couplings, cfg.cubic["modulation_amplitude"],
        cfg.cubic["t_ns"] * 1e-9)
    return squeeze, cubic


@pytest.fixture(scope="session")
def pipeline_lossy(chain):
    """Full density-matrix pipeline at the reference loss rate, dim 80."""
    squeeze, cubic = _protocols(chain)
    lcfg = chain.cfg.lindblad_config()
    return prepare_cubic_phase_state(chain.couplings, squeeze, cubic, lcfg,
                                     dim=chain.cfg.sim["dim"])


@pytest.fixture(scope="session")
def pipeline_lossless(chain):
    """Same pipeline with kappa = 0 (pure-state integration), dim 80."""
    squeeze, cubic = _protocols(chain)
    lcfg = chain.cfg.lindblad_config(lossless=True)
    return prepare_cubic_phase_state(chain.couplings, squeeze, cubic, lcfg,
                                     dim=chain.cfg.sim["dim"])
