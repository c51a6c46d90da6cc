"""Command-line interface: experiment orchestration and result persistence.

Subcommands: couplings | eigenmode | simulate | wigner | universality-check
| plot.  Exit codes: 0 success, 2 config/validation problems, 3 numerical
failures.  JSON reports are schema-versioned and written deterministically
(sorted keys); states are persisted as .npy blobs with a JSON sidecar
recording the dimension and quadrature convention.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .analysis import (negativity_volume, wigner, wigner_from_csv,
                       wigner_to_csv)
from .circuit import couplings_report, derive_couplings, effective_cubic_drive
from .config import default_config, parse_config
from .errors import NumericalError, ValidationError
from .fock import QuantumState, trajectory_to_csv, ladder_ops
from .protocols import (CubicProtocol, SqueezeProtocol, detuning_correction,
                        prepare_cubic_phase_state, run_squeeze)
from .universality import (commutator_exact, commutator_compose,
                           low_level_defect, synthesize_polynomial,
                           t_gate_coefficients, t_gate_target)

REPORT_SCHEMA = "snailsim/report-v1"
STATE_SCHEMA = "snailsim/state-v1"
CONVENTION = "hbar=1, q=(a+adag)/sqrt(2)"


def _load_config(path):
    return parse_config(path) if path else default_config()


def _emit(payload: dict, output: Path | None, name: str):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if output is None:
        click.echo(text)
    else:
        output.mkdir(parents=True, exist_ok=True)
        (output / name).write_text(text + "\n")
        click.echo(f"wrote {output / name}")


def _save_state(state: QuantumState, output: Path, name: str):
    kind = "ket" if state.is_pure else "rho"
    np.save(output / f"{name}.npy",
            state.ket if state.is_pure else state.rho)
    sidecar = {"schema": STATE_SCHEMA, "dim": state.dim, "kind": kind,
               "convention": CONVENTION}
    (output / f"{name}.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def _load_state(path: Path) -> QuantumState:
    sidecar = json.loads(path.with_suffix(".json").read_text())
    data = np.load(path.with_suffix(".npy"))
    if sidecar["kind"] == "ket":
        return QuantumState(sidecar["dim"], ket=data)
    return QuantumState(sidecar["dim"], rho=data)


def exit_codes(fn):
    """Map validation problems to exit 2 and numerical failures to exit 3."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except NumericalError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)

    return wrapper


config_option = click.option("--config", "config_path", type=click.Path(
    exists=True, dir_okay=False), default=None,
    help="JSON config; defaults to the reference parameter set.")
output_option = click.option("--output", type=click.Path(file_okay=False),
                             default=None, help="Output directory "
                             "(reports print to stdout when omitted).")


@click.group()
@click.version_option(version=__version__, prog_name="snailsim")
def main():
    """Flux-modulated SNAIL resonator simulator."""


@main.command()
@config_option
@output_option
@exit_codes
def couplings(config_path, output):
    """Derive the Hamiltonian coupling table from circuit parameters."""
    cfg = _load_config(config_path)
    _, mode, cpl = derive_couplings(cfg.snail_params(), cfg.resonator_params(),
                                    cfg.l_j, cfg.sim["expansion_order"])
    lam = cfg.cubic["modulation_amplitude"]
    rep = {
        "schema": REPORT_SCHEMA,
        "kind": "couplings",
        "couplings": couplings_report(cpl),
        "phi_zpf": mode.phi_zpf,
        "g3_eff_mhz": effective_cubic_drive(cpl, lam) / (2 * np.pi * 1e6),
        "detuning_mhz": detuning_correction(cpl, lam) / (2 * np.pi * 1e6),
        "config": cfg.to_dict(),
    }
    _emit(rep, Path(output) if output else None, "couplings.json")


@main.command()
@config_option
@output_option
@exit_codes
def eigenmode(config_path, output):
    """Solve the dressed-mode equation for the resonator + SNAIL system."""
    cfg = _load_config(config_path)
    _, mode, _ = derive_couplings(cfg.snail_params(), cfg.resonator_params(),
                                  cfg.l_j, cfg.sim["expansion_order"])
    rep = {
        "schema": REPORT_SCHEMA,
        "kind": "eigenmode",
        "omega_r_ghz": mode.omega_r / (2 * np.pi * 1e9),
        "omega_0_ghz": cfg.resonator["omega0_ghz"],
        "eta": mode.eta,
        "phi_zpf": mode.phi_zpf,
        "config": cfg.to_dict(),
    }
    _emit(rep, Path(output) if output else None, "eigenmode.json")


@main.command()
@config_option
@output_option
@click.option("--dim", type=int, default=None, help="Override truncation.")
@click.option("--kappa-khz", type=float, default=None,
              help="Override the loss rate.")
@click.option("--lossless", is_flag=True, help="Run with kappa = 0.")
@exit_codes
def simulate(config_path, output, dim, kappa_khz, lossless):
    """Run the squeeze + cubic-gate preparation and report fidelities."""
    cfg = _load_config(config_path)
    raw = cfg.to_dict()
    if dim is not None:
        raw["sim"]["dim"] = dim
    if kappa_khz is not None:
        raw["loss"]["kappa_khz"] = kappa_khz
    from .config import validate_config
    cfg = validate_config(raw)

    _, mode, cpl = derive_couplings(cfg.snail_params(), cfg.resonator_params(),
                                    cfg.l_j, cfg.sim["expansion_order"])
    snap = cfg.sim["snap_to_cycles"]
    squeeze = SqueezeProtocol.for_target_displacement(
        cfg.squeeze["xi_eff"], cpl.omega_r, cfg.squeeze["t_ns"] * 1e-9,
        snap_cycles=snap)
    cubic = CubicProtocol.for_couplings(
        cpl, cfg.cubic["modulation_amplitude"], cfg.cubic["t_ns"] * 1e-9,
        snap_cycles=snap)
    lcfg = cfg.lindblad_config(lossless=lossless)
    result = prepare_cubic_phase_state(cpl, squeeze, cubic, lcfg,
                                       dim=cfg.sim["dim"])

    w = wigner(result.frame_corrected_state)
    rep = {
        "schema": REPORT_SCHEMA,
        "kind": "simulate",
        "omega_r_ghz": cpl.omega_r / (2 * np.pi * 1e9),
        "kappa_khz": lcfg.kappa / (2 * np.pi * 1e3),
        "t_sq_ns": squeeze.t_sq * 1e9,
        "t_g_ns": cubic.t_g * 1e9,
        "achieved_r": result.achieved_r,
        "achieved_gamma": result.achieved_gamma,
        "fidelity_cubic_phase_state": result.fidelity_to_ideal,
        "fidelity_squeezed_state": result.details["squeeze_fidelity"],
        "rotation_angle_rad": result.rotation_angle,
        "displacement_undone": [result.displacement_undone.real,
                                result.displacement_undone.imag],
        "wigner_min": w.min(),
        "negativity_volume": negativity_volume(w),
        "config": cfg.to_dict(),
    }
    out = Path(output) if output else None
    _emit(rep, out, "report.json")
    if out is not None:
        _save_state(result.final_state, out, "final_state")
        _save_state(result.frame_corrected_state, out, "corrected_state")
        trajectory_to_csv(result.trajectory, out / "trajectory_cubic.csv")
        wigner_to_csv(w, out / "wigner_corrected.csv")
        click.echo(f"wrote states, trajectory and Wigner grid to {out}")


@main.command("wigner")
@click.option("--state", "state_path", type=click.Path(), required=True,
              help="State blob (.npy with .json sidecar), extension optional.")
@output_option
@click.option("--extent", type=float, default=5.0,
              help="Half-width of the (q, p) grid.")
@click.option("--points", type=int, default=201, help="Grid points per axis.")
@exit_codes
def wigner_cmd(state_path, output, extent, points):
    """Compute a Wigner grid CSV for a stored state."""
    state = _load_state(Path(state_path))
    axis = np.linspace(-extent, extent, points)
    w = wigner(state, axis, axis)
    out = Path(output) if output else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    name = Path(state_path).stem
    path = out / f"wigner_{name}.csv"
    wigner_to_csv(w, path)
    click.echo(f"wrote {path} (integral {w.integral():.6f}, "
               f"min {w.min():.6f})")


@main.command("universality-check")
@output_option
@click.option("--dim", type=int, default=40, help="Truncation dimension.")
@exit_codes
def universality_check(output, dim):
    """Verify the commutator-composition error law and gate synthesis."""
    ops = ladder_ops(dim)
    q3 = ops.q @ ops.q @ ops.q
    dts = [0.1 / 2**k for k in range(7)]
    defects = []
    for dt in dts:
        U = commutator_compose(q3, ops.p, dt)
        V = commutator_exact(q3, ops.p, dt)
        defects.append(low_level_defect(U, V, dim // 2))
    ratios = [defects[i] / defects[i + 1] for i in range(len(dts) - 1)]
    seq, defect = synthesize_polynomial(t_gate_coefficients(), dim,
                                        defect_levels=10)
    tg_check = low_level_defect(seq.unitary(dim), t_gate_target(dim), 10)
    rep = {
        "schema": REPORT_SCHEMA,
        "kind": "universality-check",
        "dim": dim,
        "dt": dts,
        "defect": defects,
        "halving_ratios": ratios,
        "expected_ratio": 8.0,
        "t_gate_sequence_length": len(seq),
        "t_gate_defect_lowest10": tg_check,
        "t_gate_defect_from_synthesis": defect,
    }
    _emit(rep, Path(output) if output else None, "universality.json")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True),
              required=True, help="Wigner CSV produced by this tool.")
@output_option
@exit_codes
def plot(input_path, output):
    """Render a Wigner CSV as a PNG heat map."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    w = wigner_from_csv(input_path)
    fig, ax = plt.subplots(figsize=(5, 4.2))
    scale = max(abs(w.values.min()), abs(w.values.max()))
    im = ax.pcolormesh(w.q_axis, w.p_axis, w.values, cmap="RdBu_r",
                       vmin=-scale, vmax=scale, shading="auto")
    ax.set_xlabel("q")
    ax.set_ylabel("p")
    fig.colorbar(im, ax=ax, label="W(q, p)")
    out = Path(output) if output else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / (Path(input_path).stem + ".png")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
