"""Geometry presets, parameter sweeps, and exclusion-curve construction."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .geometry import (
    ExperimentGeometry,
    MassSpin,
    SensorLayer,
    TestMass,
    Trajectory,
)
from .kernels import PotentialKind
from .mc import MCConfig, field_amplitude
from .sensitivity import delta_b_min, figure_of_merit


class UnknownPresetError(ValueError):
    pass


@dataclass(frozen=True)
class GeometryPreset:
    name: str
    target_lambda: float                # m
    geometry: ExperimentGeometry
    measurement_time_t: float           # s


@dataclass(frozen=True)
class SweepResult:
    param_name: str
    grid: list
    fom_normalized: list
    mc_errors: list


@dataclass(frozen=True)
class ExclusionCurve:
    kind: PotentialKind
    preset_name: str
    lambda_grid: list
    f_min: list
    f_min_stderr: list
    field_per_coupling: list            # T per unit coupling
    t_total: float
    flagged: list                       # points with relative error > 5%


# shared sensor budget (contrast, density, readout) for every preset
_SENSOR_KW = dict(
    illum_radius_R_nv=25e-6,
    nv_density_n=1e24,                  # 10^6 um^-3
    contrast_C=0.03,
    photon_prob_eta=0.05,
    duty_delta=0.8,
    phase_time_tau_tot=17e-6,
)

_TRAJ_KW = dict(amplitude_d1=0.75e-6, frequency_f_m=1e6)

_UNPOLARIZED = {
    "unpolarized-50um": dict(target=50e-6, d_nv=62.5e-6, d_gap=5e-6),
    "unpolarized-5um": dict(target=5e-6, d_nv=6.25e-6, d_gap=0.5e-6),
    "unpolarized-0.5um": dict(target=0.5e-6, d_nv=0.625e-6, d_gap=0.2e-6),
}

_POLARIZED_THETA = math.radians(80.0)
_X = np.array([1.0, 0.0, 0.0])
_Y = np.array([0.0, 1.0, 0.0])
# test-mass spin along the bias field, at theta to sigma_nv in the x-z plane
_SIGMA_TM = np.array([math.cos(_POLARIZED_THETA), 0.0, math.sin(_POLARIZED_THETA)])

PRESET_NAMES = (*_UNPOLARIZED, "polarized-1um")

EXCLUSION_TIME_S = 1e4


def _orientation(kind: PotentialKind) -> tuple[np.ndarray, np.ndarray, float]:
    """(sigma_nv, e_v, bias angle) for the geometry probing each kind."""
    if kind is PotentialKind.V12_13:
        return _X, _X, 0.0                      # motion along sigma_nv
    if kind is PotentialKind.V4_5:
        return _Y, _X, 0.0                      # motion perpendicular to sigma_nv
    if kind is PotentialKind.V6_7:
        return _X, _X, _POLARIZED_THETA         # motion along sigma_nv
    # V14 and V15: motion perpendicular to sigma_nv
    return _X, _Y, _POLARIZED_THETA


def preset(name: str, kind: PotentialKind | None = None) -> GeometryPreset:
    """Table geometry by name, oriented for the requested interaction."""
    if name in _UNPOLARIZED:
        p = _UNPOLARIZED[name]
        kind = kind or PotentialKind.V12_13
        sigma_nv, e_v, theta = _orientation(kind)
        mass = TestMass(radius_R_tm=150e-6, thickness_d_tm=100e-6, nucleon_density_rho=1.6e30)
        geom = ExperimentGeometry(
            sensor=SensorLayer(thickness_d_nv=p["d_nv"], sigma_nv=sigma_nv, **_SENSOR_KW),
            mass=mass,
            gap_d_gap=p["d_gap"],
            trajectory=Trajectory(direction_e_v=e_v, **_TRAJ_KW),
            bias_field_B0=10e-3,
            bias_angle_theta=theta,
        )
        return GeometryPreset(name=name, target_lambda=p["target"], geometry=geom,
                              measurement_time_t=EXCLUSION_TIME_S)
    if name == "polarized-1um":
        kind = kind or PotentialKind.V6_7
        sigma_nv, e_v, theta = _orientation(kind)
        mass = TestMass(
            radius_R_tm=150e-6,
            thickness_d_tm=2e-6,
            nucleon_density_rho=2.1e30,        # diamond
            spin=MassSpin(polarized_density_rho_s=5e25, sigma_tm=_SIGMA_TM, nuclear_moment=3.5e-27),
        )
        geom = ExperimentGeometry(
            sensor=SensorLayer(thickness_d_nv=1.25e-6, sigma_nv=sigma_nv, **_SENSOR_KW),
            mass=mass,
            gap_d_gap=0.5e-6,
            trajectory=Trajectory(direction_e_v=e_v, **_TRAJ_KW),
            bias_field_B0=10e-3,
            bias_angle_theta=theta,
        )
        return GeometryPreset(name=name, target_lambda=1e-6, geometry=geom,
                              measurement_time_t=EXCLUSION_TIME_S)
    raise UnknownPresetError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")


SWEEP_PARAMS = ("d_nv", "d_tm", "R_tm", "d_gap", "A_nv")


def _with_param(geom: ExperimentGeometry, param: str, value: float, lam: float) -> ExperimentGeometry:
    if param == "d_nv":
        # point-sensor limit: shrink the illuminated spot so the layer
        # thickness is the only varying dimension
        r_small = min(0.05 * geom.mass.radius_R_tm, 0.05 * lam)
        sensor = replace(geom.sensor, thickness_d_nv=value, illum_radius_R_nv=r_small)
        return replace(geom, sensor=sensor)
    if param == "d_tm":
        return replace(geom, mass=replace(geom.mass, thickness_d_tm=value))
    if param == "R_tm":
        return replace(geom, mass=replace(geom.mass, radius_R_tm=value))
    if param == "d_gap":
        return replace(geom, gap_d_gap=value)
    if param == "A_nv":
        return replace(geom, sensor=replace(geom.sensor, illum_radius_R_nv=value))
    raise ValueError(f"unknown sweep parameter {param!r}; known: {', '.join(SWEEP_PARAMS)}")


def sweep(
    pre: GeometryPreset,
    kind: PotentialKind,
    lam: float,
    param_name: str,
    grid,
    mc: MCConfig,
    k: PhysicalConstants = CONSTANTS,
) -> SweepResult:
    """Figure of merit over a parameter grid, all else held at the preset."""
    grid = list(grid)
    if len(grid) < 5 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing with >= 5 points")
    foms, errs = [], []
    for value in grid:
        geom = _with_param(pre.geometry, param_name, value, lam)
        fom, err = figure_of_merit(geom, kind, lam, mc, pre.measurement_time_t, k)
        foms.append(fom)
        errs.append(err)
    peak = max(foms)
    return SweepResult(
        param_name=param_name,
        grid=grid,
        fom_normalized=[f / peak for f in foms],
        mc_errors=[e / peak for e in errs],
    )


def area_penalty(
    pre: GeometryPreset,
    kind: PotentialKind,
    lam: float,
    mc: MCConfig,
    k: PhysicalConstants = CONSTANTS,
) -> float:
    """Field-amplitude ratio of a point-like illumination spot to the
    preset's spot; >= 1, and close to 1 when the spot is already small
    compared to the test mass."""
    small = _with_param(pre.geometry, "A_nv", 0.05 * pre.geometry.mass.radius_R_tm, lam)
    b_small = field_amplitude(small, kind, lam, mc, k).amplitude_per_coupling
    b_full = field_amplitude(pre.geometry, kind, lam, mc, k).amplitude_per_coupling
    return abs(b_small) / abs(b_full)


def default_lambda_grid(lam_min: float = 0.1e-6, lam_max: float = 1e-3, per_decade: int = 20):
    n = int(round(math.log10(lam_max / lam_min) * per_decade)) + 1
    return list(np.geomspace(lam_min, lam_max, n))


def exclusion_curve(
    kind: PotentialKind,
    pre: GeometryPreset,
    lambda_grid,
    mc: MCConfig,
    t: float | None = None,
    k: PhysicalConstants = CONSTANTS,
) -> ExclusionCurve:
    """Minimum detectable coupling f_min(lambda) = delta_b_min / (B per unit
    coupling), from the in-phase signal amplitude."""
    lambda_grid = list(lambda_grid)
    if any(l <= 0 for l in lambda_grid) or any(b <= a for a, b in zip(lambda_grid, lambda_grid[1:])):
        raise ValueError("lambda_grid must be positive and ascending")
    t = pre.measurement_time_t if t is None else t
    db = delta_b_min(pre.geometry.sensor, t, k).delta_b_min
    f_min, f_se, fields, flagged = [], [], [], []
    for lam in lambda_grid:
        est = field_amplitude(pre.geometry, kind, lam, mc, k)
        amp = abs(est.amplitude_per_coupling)
        if amp == 0.0:
            raise ValueError(f"zero field amplitude at lambda={lam}; geometry not sensitive to {kind.value}")
        rel = est.std_error / amp
        f_min.append(db / amp)
        f_se.append(db / amp * rel)
        fields.append(amp)
        flagged.append(rel > 0.05)
    return ExclusionCurve(
        kind=kind,
        preset_name=pre.name,
        lambda_grid=lambda_grid,
        f_min=f_min,
        f_min_stderr=f_se,
        field_per_coupling=fields,
        t_total=t,
        flagged=flagged,
    )


class OverlayFormatError(ValueError):
    pass


def overlay_import(path) -> list:
    """External constraint curve from a CSV with header 'lambda_m,f'."""
    points = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise OverlayFormatError(f"{path}: empty file")
        if [h.strip() for h in header] != ["lambda_m", "f"]:
            raise OverlayFormatError(f"{path}: expected header 'lambda_m,f', got {','.join(header)!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise OverlayFormatError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                points.append((float(row[0]), float(row[1])))
            except ValueError:
                raise OverlayFormatError(f"{path}:{lineno}: non-numeric field in {row}")
    return points


def preset_to_dict(pre: GeometryPreset) -> dict:
    g = pre.geometry
    d = {
        "name": pre.name,
        "target_lambda": pre.target_lambda,
        "measurement_time_t": pre.measurement_time_t,
        "sensor": {
            "thickness_d_nv": g.sensor.thickness_d_nv,
            "illum_radius_R_nv": g.sensor.illum_radius_R_nv,
            "sigma_nv": list(g.sensor.sigma_nv),
            "nv_density_n": g.sensor.nv_density_n,
            "contrast_C": g.sensor.contrast_C,
            "photon_prob_eta": g.sensor.photon_prob_eta,
            "duty_delta": g.sensor.duty_delta,
            "phase_time_tau_tot": g.sensor.phase_time_tau_tot,
        },
        "mass": {
            "radius_R_tm": g.mass.radius_R_tm,
            "thickness_d_tm": g.mass.thickness_d_tm,
            "nucleon_density_rho": g.mass.nucleon_density_rho,
        },
        "gap_d_gap": g.gap_d_gap,
        "trajectory": {
            "amplitude_d1": g.trajectory.amplitude_d1,
            "frequency_f_m": g.trajectory.frequency_f_m,
            "direction_e_v": list(g.trajectory.direction_e_v),
        },
        "bias_field_B0": g.bias_field_B0,
        "bias_angle_theta": g.bias_angle_theta,
    }
    if g.mass.spin is not None:
        d["mass"]["spin"] = {
            "polarized_density_rho_s": g.mass.spin.polarized_density_rho_s,
            "sigma_tm": list(g.mass.spin.sigma_tm),
            "nuclear_moment": g.mass.spin.nuclear_moment,
        }
    return d


def preset_from_dict(d: dict) -> GeometryPreset:
    spin_d = d["mass"].get("spin")
    spin = None
    if spin_d is not None:
        spin = MassSpin(
            polarized_density_rho_s=spin_d["polarized_density_rho_s"],
            sigma_tm=np.array(spin_d["sigma_tm"]),
            nuclear_moment=spin_d["nuclear_moment"],
        )
    geom = ExperimentGeometry(
        sensor=SensorLayer(
            thickness_d_nv=d["sensor"]["thickness_d_nv"],
            illum_radius_R_nv=d["sensor"]["illum_radius_R_nv"],
            sigma_nv=np.array(d["sensor"]["sigma_nv"]),
            nv_density_n=d["sensor"]["nv_density_n"],
            contrast_C=d["sensor"]["contrast_C"],
            photon_prob_eta=d["sensor"]["photon_prob_eta"],
            duty_delta=d["sensor"]["duty_delta"],
            phase_time_tau_tot=d["sensor"]["phase_time_tau_tot"],
        ),
        mass=TestMass(
            radius_R_tm=d["mass"]["radius_R_tm"],
            thickness_d_tm=d["mass"]["thickness_d_tm"],
            nucleon_density_rho=d["mass"]["nucleon_density_rho"],
            spin=spin,
        ),
        gap_d_gap=d["gap_d_gap"],
        trajectory=Trajectory(
            amplitude_d1=d["trajectory"]["amplitude_d1"],
            frequency_f_m=d["trajectory"]["frequency_f_m"],
            direction_e_v=np.array(d["trajectory"]["direction_e_v"]),
        ),
        bias_field_B0=d["bias_field_B0"],
        bias_angle_theta=d["bias_angle_theta"],
    )
    return GeometryPreset(
        name=d["name"],
        target_lambda=d["target_lambda"],
        geometry=geom,
        measurement_time_t=d["measurement_time_t"],
    )
