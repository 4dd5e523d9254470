"""Batch command-line front-end: config ingestion, one subcommand per
pipeline stage, deterministic CSV/JSON emission.

Exit codes: 0 success, 2 config/validation error, 3 MC non-convergence
(output file still written, flagged).
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import geometry as geo
from .kernels import PotentialKind
from .mc import MCConfig, field_amplitude
from .optimize import (
    GeometryPreset,
    SWEEP_PARAMS,
    exclusion_curve,
    preset,
    PRESET_NAMES,
    sweep,
    UnknownPresetError,
)
from .sensitivity import nv_responsivity, signal_weighted_responsivity
from .systematics import BudgetAssumptions, budget, budget_text, budget_to_dict

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3

FLOAT_FMT = "%.8e"  # 9 significant digits, scientific


class ConfigError(Exception):
    pass


_KNOWN_KEYS = {
    "geometry": {
        "preset", "d_nv_um", "r_nv_um", "d_tm_um", "r_tm_um", "d_gap_um",
        "rho_per_m3", "sigma_nv", "sigma_tm", "theta_deg", "b0_mt",
    },
    "trajectory": {"d1_um", "f_m_mhz", "direction"},
    "mc": {"samples", "seed", "phase_points", "target_rel_se"},
    "run": {"kind", "lambda_um", "lambda_grid", "t_s", "out_dir"},
}

_DEFAULT_SWEEP_GRIDS = {
    "d_nv": (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0, 5.0),
    "d_tm": (0.5, 1.0, 2.0, 3.0, 4.0, 6.0),
    "R_tm": (0.5, 1.0, 2.0, 3.0, 6.0, 9.0),
    "d_gap": (0.01, 0.03, 0.1, 0.3, 1.0),
}


def _parse_vector(raw: str, key: str) -> np.ndarray:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected 3 comma-separated floats, got {raw!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise ConfigError(f"{key}: non-numeric component in {raw!r}")


def _parse_float(cfg, section, key, default=None):
    if not cfg.has_option(section, key):
        return default
    raw = cfg.get(section, key)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}: not a number: {raw!r}")


def _parse_int(cfg, section, key, default=None):
    if not cfg.has_option(section, key):
        return default
    raw = cfg.get(section, key)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}: not an integer: {raw!r}")


def load_config(path: str) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    read = cfg.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    for section in cfg.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in cfg.options(section):
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    return cfg


def _preset_names(cfg) -> list[str]:
    raw = cfg.get("geometry", "preset", fallback="")
    return [p.strip() for p in raw.split(",") if p.strip()]


def build_geometry(cfg, kind: PotentialKind, preset_name: str | None = None) -> GeometryPreset:
    names = _preset_names(cfg)
    if preset_name is None:
        if len(names) != 1:
            raise ConfigError("geometry.preset: exactly one preset required for this command")
        preset_name = names[0]
    try:
        pre = preset(preset_name, kind)
    except UnknownPresetError as exc:
        raise ConfigError(f"geometry.preset: {exc}")
    g = pre.geometry
    sensor, mass, traj = g.sensor, g.mass, g.trajectory

    d_nv = _parse_float(cfg, "geometry", "d_nv_um")
    r_nv = _parse_float(cfg, "geometry", "r_nv_um")
    if d_nv is not None:
        sensor = dataclasses.replace(sensor, thickness_d_nv=d_nv * 1e-6)
    if r_nv is not None:
        sensor = dataclasses.replace(sensor, illum_radius_R_nv=r_nv * 1e-6)
    if cfg.has_option("geometry", "sigma_nv"):
        sensor = dataclasses.replace(sensor, sigma_nv=_parse_vector(cfg.get("geometry", "sigma_nv"), "geometry.sigma_nv"))

    d_tm = _parse_float(cfg, "geometry", "d_tm_um")
    r_tm = _parse_float(cfg, "geometry", "r_tm_um")
    rho = _parse_float(cfg, "geometry", "rho_per_m3")
    if d_tm is not None:
        mass = dataclasses.replace(mass, thickness_d_tm=d_tm * 1e-6)
    if r_tm is not None:
        mass = dataclasses.replace(mass, radius_R_tm=r_tm * 1e-6)
    if rho is not None:
        mass = dataclasses.replace(mass, nucleon_density_rho=rho)
    if cfg.has_option("geometry", "sigma_tm"):
        if mass.spin is None:
            raise ConfigError("geometry.sigma_tm: preset has no polarized mass")
        spin = dataclasses.replace(mass.spin, sigma_tm=_parse_vector(cfg.get("geometry", "sigma_tm"), "geometry.sigma_tm"))
        mass = dataclasses.replace(mass, spin=spin)

    d1 = _parse_float(cfg, "trajectory", "d1_um")
    f_m = _parse_float(cfg, "trajectory", "f_m_mhz")
    if d1 is not None:
        traj = dataclasses.replace(traj, amplitude_d1=d1 * 1e-6)
    if f_m is not None:
        traj = dataclasses.replace(traj, frequency_f_m=f_m * 1e6)
    if cfg.has_option("trajectory", "direction"):
        traj = dataclasses.replace(traj, direction_e_v=_parse_vector(cfg.get("trajectory", "direction"), "trajectory.direction"))

    kwargs = {}
    d_gap = _parse_float(cfg, "geometry", "d_gap_um")
    if d_gap is not None:
        kwargs["gap_d_gap"] = d_gap * 1e-6
    b0 = _parse_float(cfg, "geometry", "b0_mt")
    if b0 is not None:
        kwargs["bias_field_B0"] = b0 * 1e-3
    theta = _parse_float(cfg, "geometry", "theta_deg")
    if theta is not None:
        kwargs["bias_angle_theta"] = math.radians(theta)

    try:
        new_geom = dataclasses.replace(g, sensor=sensor, mass=mass, trajectory=traj, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc))
    t_s = _parse_float(cfg, "run", "t_s")
    return dataclasses.replace(
        pre,
        geometry=new_geom,
        measurement_time_t=t_s if t_s is not None else pre.measurement_time_t,
    )


def build_mc(cfg) -> MCConfig:
    kwargs = {}
    # `samples` is the total sampling budget; convergence may stop earlier
    samples = _parse_int(cfg, "mc", "samples")
    if samples is not None:
        kwargs["max_samples"] = samples
        kwargs["n_samples"] = min(MCConfig.n_samples, samples)
    seed = _parse_int(cfg, "mc", "seed")
    if seed is not None:
        kwargs["seed"] = seed
    pp = _parse_int(cfg, "mc", "phase_points")
    if pp is not None:
        kwargs["n_phase_points"] = pp
    rel = _parse_float(cfg, "mc", "target_rel_se")
    if rel is not None:
        kwargs["target_rel_se"] = rel
    try:
        return MCConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"[mc]: {exc}")


def get_kind(cfg) -> PotentialKind:
    raw = cfg.get("run", "kind", fallback="")
    if not raw:
        raise ConfigError("run.kind is required")
    try:
        return PotentialKind(raw.strip().lower())
    except ValueError:
        raise ConfigError(f"run.kind: unknown kind {raw!r}; known: {', '.join(k.value for k in PotentialKind)}")


def get_lambda_grid(cfg) -> list[float]:
    if cfg.has_option("run", "lambda_um"):
        lam = _parse_float(cfg, "run", "lambda_um")
        if lam is None or lam <= 0:
            raise ConfigError("run.lambda_um: lambda must be positive")
        return [lam * 1e-6]
    if cfg.has_option("run", "lambda_grid"):
        raw = cfg.get("run", "lambda_grid")
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) != 3:
            raise ConfigError("run.lambda_grid: expected 'min_um,max_um,points_per_decade'")
        try:
            lo, hi, ppd = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"run.lambda_grid: non-numeric field in {raw!r}")
        if lo <= 0 or hi <= lo or ppd < 1:
            raise ConfigError("run.lambda_grid: need 0 < min < max and points_per_decade >= 1")
        n = int(round(math.log10(hi / lo) * ppd)) + 1
        return list(np.geomspace(lo * 1e-6, hi * 1e-6, max(n, 2)))
    raise ConfigError("run: one of lambda_um or lambda_grid is required")


def get_out_dir(cfg) -> Path:
    out = Path(cfg.get("run", "out_dir", fallback="."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _check_polarization(cfg, kind: PotentialKind, names: list[str], force: bool):
    for n in names:
        polarized = n.startswith("polarized")
        if kind.requires_polarized_mass and not polarized:
            raise ConfigError(f"potential {kind.value} requires a polarized test mass; preset {n!r} has none")
        if polarized and not kind.requires_polarized_mass and not force:
            raise ConfigError(
                f"potential {kind.value} does not require polarized mass (preset {n!r}); pass --force to proceed"
            )


def _write_text(path: Path, text: str):
    path.write_text(text, encoding="utf-8", newline="\n")


def _csv_lines(header: str, rows) -> str:
    lines = [header]
    for row in rows:
        lines.append(",".join(FLOAT_FMT % x for x in row))
    return "\n".join(lines) + "\n"


def cmd_field(cfg, force: bool) -> int:
    kind = get_kind(cfg)
    _check_polarization(cfg, kind, _preset_names(cfg), force)
    pre = build_geometry(cfg, kind)
    mc = build_mc(cfg)
    grid = get_lambda_grid(cfg)
    if len(grid) != 1:
        raise ConfigError("field command needs a single lambda_um")
    est = field_amplitude(pre.geometry, kind, grid[0], mc)
    out = get_out_dir(cfg) / "field.json"
    payload = {
        "kind": kind.value,
        "preset": pre.name,
        "lambda_m": grid[0],
        "amplitude_per_coupling_T": est.amplitude_per_coupling,
        "std_error_T": est.std_error,
        "seed": est.seed_used,
        "samples": est.samples_used,
        "flagged": not est.converged,
        "per_phase": [
            {"phase_rad": p, "B_per_coupling_T": b, "std_error_T": se}
            for (p, b, se) in est.per_phase_values
        ],
    }
    _write_text(out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return EXIT_OK if est.converged else EXIT_NONCONVERGED


def cmd_optimize(cfg, force: bool) -> int:
    kind = get_kind(cfg)
    _check_polarization(cfg, kind, _preset_names(cfg), force)
    pre = build_geometry(cfg, kind)
    mc = build_mc(cfg)
    grid = get_lambda_grid(cfg)
    if len(grid) != 1:
        raise ConfigError("optimize command needs a single lambda_um")
    lam = grid[0]
    out_dir = get_out_dir(cfg)
    for param, mults in _DEFAULT_SWEEP_GRIDS.items():
        values = [m * lam for m in mults]
        res = sweep(pre, kind, lam, param, values, mc)
        text = _csv_lines(
            "param_value_m,fom_normalized,stderr",
            zip(res.grid, res.fom_normalized, res.mc_errors),
        )
        _write_text(out_dir / f"sweep_{param}.csv", text)
    return EXIT_OK


def cmd_exclusion(cfg, force: bool) -> int:
    kind = get_kind(cfg)
    names = _preset_names(cfg)
    if not names:
        raise ConfigError("geometry.preset is required for exclusion runs")
    _check_polarization(cfg, kind, names, force)
    mc = build_mc(cfg)
    grid = get_lambda_grid(cfg)
    out_dir = get_out_dir(cfg)
    status = EXIT_OK
    for name in names:
        pre = build_geometry(cfg, kind, preset_name=name)
        curve = exclusion_curve(kind, pre, grid, mc)
        text = _csv_lines(
            "lambda_m,f_min,f_min_stderr,field_per_coupling_T",
            zip(curve.lambda_grid, curve.f_min, curve.f_min_stderr, curve.field_per_coupling),
        )
        _write_text(out_dir / f"exclusion_{kind.value}_{pre.name}.csv", text)
        if any(curve.flagged):
            status = EXIT_NONCONVERGED
    return status


def cmd_systematics(cfg, force: bool) -> int:
    kind = get_kind(cfg)
    _check_polarization(cfg, kind, _preset_names(cfg), force)
    pre = build_geometry(cfg, kind)
    mc = build_mc(cfg) if cfg.has_section("mc") else None
    b = budget(pre, kind, BudgetAssumptions(), mc=mc)
    out_dir = get_out_dir(cfg)
    _write_text(out_dir / "budget.json", json.dumps(budget_to_dict(b), sort_keys=True, indent=2) + "\n")
    _write_text(out_dir / "budget.txt", budget_text(b))
    return EXIT_OK


def cmd_responsivity(cfg, force: bool) -> int:
    b0 = _parse_float(cfg, "geometry", "b0_mt", default=10.0) * 1e-3
    out_dir = get_out_dir(cfg)
    r0, _ = nv_responsivity(b0, 0.0)
    rows = []
    for i in range(181):  # 0..90 deg in 0.5 deg steps
        theta_deg = i * 0.5
        theta = math.radians(theta_deg)
        r, _ = nv_responsivity(b0, theta)
        rows.append((theta_deg, r, math.sin(theta) * r / r0))
    _write_text(out_dir / "responsivity.csv", _csv_lines("theta_deg,responsivity_hz_per_t,weighted", rows))
    return EXIT_OK


_COMMANDS = {
    "field": cmd_field,
    "optimize": cmd_optimize,
    "exclusion": cmd_exclusion,
    "systematics": cmd_systematics,
    "responsivity": cmd_responsivity,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="exospin",
        description="Effective fields, geometry optimization, exclusion curves, and "
        "systematics budgets for exotic spin-interaction searches with NV sensors.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("config", help="INI-style run configuration file")
    parser.add_argument("--force", action="store_true",
                        help="proceed despite polarization/kind mismatch warnings")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args.force)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
