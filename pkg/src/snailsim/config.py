"""Experiment configuration: JSON schema, defaults, validation, unit handling.

User-facing units are fixed by the schema: GHz for the bare resonator
frequency, kHz for the loss rate, ns for durations, ohms and picohenry for
impedance and junction inductance, and flux in units of the *full* flux
quantum Phi_0 (so ``flux_bias = 0.5`` means half a flux quantum; internally
the reduced phase is 2 pi times this).  All internal math runs in angular
frequency (rad/s) and seconds.

The defaults reproduce the reference device: a single SNAIL with n = 3 large
junctions, alpha = 0.1, L_J = 600 pH, a 8.8 GHz / 50 ohm quarter-wave
resonator, modulation amplitude 0.1, and 50 kHz single-photon loss.  The
default flux bias 0.3931 Phi_0 places the device at its effective-Kerr-free
operating point, where the bare quartic coupling cancels the quartic
renormalization induced by the cubic term (12 g4 = 60 g3^2 / omega_r).
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass

import numpy as np

from .circuit import ResonatorParams
from .errors import SchemaError, UnitError
from .fock import LindbladConfig
from .snail import SnailParams

TWO_PI = 2 * np.pi

DEFAULTS = {
    "snail": {"n": 3, "alpha": 0.1, "l_j_ph": 600.0, "flux_bias": 0.3931},
    "resonator": {"omega0_ghz": 8.8, "z_c_ohm": 50.0, "m_snails": 1},
    "squeeze": {"xi_eff": -0.125, "t_ns": 14.0},
    "cubic": {"modulation_amplitude": 0.1, "t_ns": 19.0},
    "loss": {"kappa_khz": 50.0},
    "sim": {"dim": 80, "rtol": 1e-8, "atol": 1e-10,
            "snap_to_cycles": True, "expansion_order": 4},
}

_NUMERIC = (int, float)

# (type, min, max, min/max exclusive?) per field; None bound = unbounded
_RULES = {
    ("snail", "n"): (int, 1, None, False),
    ("snail", "alpha"): (float, 0.0, 1.0, True),
    ("snail", "l_j_ph"): (float, 0.0, None, True),
    ("snail", "flux_bias"): (float, None, None, False),
    ("resonator", "omega0_ghz"): (float, 0.0, None, True),
    ("resonator", "z_c_ohm"): (float, 0.0, None, True),
    ("resonator", "m_snails"): (int, 1, None, False),
    ("squeeze", "xi_eff"): (float, -1.0, 1.0, True),
    ("squeeze", "t_ns"): (float, 0.0, None, True),
    ("cubic", "modulation_amplitude"): (float, 0.0, 0.5, False),
    ("cubic", "t_ns"): (float, 0.0, None, True),
    ("loss", "kappa_khz"): (float, 0.0, None, False),
    ("sim", "dim"): (int, 2, 256, False),
    ("sim", "rtol"): (float, 0.0, 1e-2, True),
    ("sim", "atol"): (float, 0.0, 1e-2, True),
    ("sim", "snap_to_cycles"): (bool, None, None, False),
    ("sim", "expansion_order"): (int, 2, 8, False),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration; see DEFAULTS for the field layout."""

    snail: dict
    resonator: dict
    squeeze: dict
    cubic: dict
    loss: dict
    sim: dict

    def snail_params(self) -> SnailParams:
        s = self.snail
        return SnailParams.from_inductance(
            n=s["n"], alpha=s["alpha"], l_j=s["l_j_ph"] * 1e-12,
            phi_ext_dc=s["flux_bias"] * TWO_PI)

    def resonator_params(self) -> ResonatorParams:
        r = self.resonator
        return ResonatorParams(omega_0=TWO_PI * r["omega0_ghz"] * 1e9,
                               z_c=r["z_c_ohm"], m_snails=r["m_snails"])

    @property
    def l_j(self) -> float:
        return self.snail["l_j_ph"] * 1e-12

    @property
    def kappa(self) -> float:
        return TWO_PI * self.loss["kappa_khz"] * 1e3

    def lindblad_config(self, lossless: bool = False) -> LindbladConfig:
        return LindbladConfig(kappa=0.0 if lossless else self.kappa,
                              rtol=self.sim["rtol"], atol=self.sim["atol"])

    def to_dict(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in
                ("snail", "resonator", "squeeze", "cubic", "loss", "sim")}


def _validate_section(section: str, data: dict, defaults: dict) -> dict:
    if not isinstance(data, dict):
        raise SchemaError(f"{section}: expected an object, "
                          f"got {type(data).__name__}")
    unknown = set(data) - set(defaults)
    if unknown:
        raise SchemaError(f"{section}.{sorted(unknown)[0]}: unknown field")
    merged = dict(defaults)
    merged.update(data)
    for key, value in merged.items():
        typ, lo, hi, exclusive = _RULES[(section, key)]
        path = f"{section}.{key}"
        if typ is bool:
            if not isinstance(value, bool):
                raise SchemaError(f"{path}: expected a boolean")
            continue
        if isinstance(value, bool) or not isinstance(value, _NUMERIC):
            raise SchemaError(f"{path}: expected a number")
        if typ is int and int(value) != value:
            raise SchemaError(f"{path}: expected an integer")
        value = typ(value)
        if lo is not None and (value <= lo if exclusive else value < lo):
            raise UnitError(f"{path}: {value} below allowed "
                            f"{'open ' if exclusive else ''}minimum {lo}")
        if hi is not None and (value >= hi if exclusive else value > hi):
            raise UnitError(f"{path}: {value} above allowed "
                            f"{'open ' if exclusive else ''}maximum {hi}")
        merged[key] = value
    return merged


def validate_config(raw: dict) -> ExperimentConfig:
    """Merge with defaults and validate; raises SchemaError / UnitError."""
    if not isinstance(raw, dict):
        raise SchemaError("top level: expected a JSON object")
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise SchemaError(f"{sorted(unknown)[0]}: unknown section")
    sections = {}
    for name, defaults in DEFAULTS.items():
        sections[name] = _validate_section(name, raw.get(name, {}), defaults)
    return ExperimentConfig(**sections)


def parse_config(path) -> ExperimentConfig:
    """Load and validate a JSON config file; missing fields get defaults."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}") from exc
    return validate_config(raw)


def default_config() -> ExperimentConfig:
    """The reference parameter set."""
    return validate_config({})
