"""Geometry, material, and trajectory types shared by every field computation.

Coordinate convention: z is the cylinder axis (normal to the diamond
surface). The NV layer occupies -d_nv <= z <= 0 within radius R_nv of the
origin; the test mass occupies d_gap <= z <= d_gap + d_tm within radius
R_tm of its center, whose lateral position is x(t) * e_v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-12


def _as_unit(vec, name: str) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector (|{name}| = 1 within {UNIT_TOL})")
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class MassSpin:
    """Polarized-spin content of a test mass."""

    polarized_density_rho_s: float      # m^-3, excess polarized nuclear spins
    sigma_tm: np.ndarray                # unit vector
    nuclear_moment: float               # J/T

    def __post_init__(self):
        if self.polarized_density_rho_s <= 0:
            raise ValueError("polarized_density_rho_s must be positive")
        if self.nuclear_moment <= 0:
            raise ValueError("nuclear_moment must be positive")
        object.__setattr__(self, "sigma_tm", _as_unit(self.sigma_tm, "sigma_tm"))


@dataclass(frozen=True)
class TestMass:
    radius_R_tm: float                  # m
    thickness_d_tm: float               # m
    nucleon_density_rho: float          # m^-3
    spin: MassSpin | None = None

    def __post_init__(self):
        if self.radius_R_tm <= 0 or self.thickness_d_tm <= 0:
            raise ValueError("test mass dimensions must be positive")
        if self.nucleon_density_rho <= 0:
            raise ValueError("nucleon_density_rho must be positive")

    @property
    def volume(self) -> float:
        return math.pi * self.radius_R_tm**2 * self.thickness_d_tm


@dataclass(frozen=True)
class SensorLayer:
    thickness_d_nv: float               # m
    illum_radius_R_nv: float            # m
    sigma_nv: np.ndarray                # unit vector
    nv_density_n: float                 # m^-3
    contrast_C: float
    photon_prob_eta: float
    duty_delta: float
    phase_time_tau_tot: float           # s

    def __post_init__(self):
        if self.thickness_d_nv <= 0 or self.illum_radius_R_nv <= 0:
            raise ValueError("sensor dimensions must be positive")
        if not 0 < self.contrast_C < 1:
            raise ValueError("contrast_C must be in (0, 1)")
        if not 0 < self.photon_prob_eta <= 1:
            raise ValueError("photon_prob_eta must be in (0, 1]")
        if not 0 < self.duty_delta <= 1:
            raise ValueError("duty_delta must be in (0, 1]")
        if self.nv_density_n <= 0 or self.phase_time_tau_tot <= 0:
            raise ValueError("nv_density_n and phase_time_tau_tot must be positive")
        object.__setattr__(self, "sigma_nv", _as_unit(self.sigma_nv, "sigma_nv"))

    @property
    def sensing_volume(self) -> float:
        return math.pi * self.illum_radius_R_nv**2 * self.thickness_d_nv


@dataclass(frozen=True)
class Trajectory:
    """Lateral harmonic motion x(t) = d1 sin(2 pi f_m t) along e_v."""

    amplitude_d1: float                 # m
    frequency_f_m: float                # Hz
    direction_e_v: np.ndarray           # unit vector, perpendicular to z

    def __post_init__(self):
        if self.amplitude_d1 < 0:
            raise ValueError("amplitude_d1 must be non-negative")
        if self.frequency_f_m <= 0:
            raise ValueError("frequency_f_m must be positive")
        object.__setattr__(self, "direction_e_v", _as_unit(self.direction_e_v, "direction_e_v"))


def peak_velocity(traj: Trajectory) -> float:
    return 2.0 * math.pi * traj.frequency_f_m * traj.amplitude_d1


def _snap(x: float) -> float:
    # cos/sin of exact multiples of pi/2 carry ~1e-16 representation error;
    # snap so zero-velocity phases give identically zero kernels
    return 0.0 if abs(x) < 1e-15 else x


def velocity_at_phase(traj: Trajectory, phase: float) -> np.ndarray:
    return peak_velocity(traj) * _snap(math.cos(phase)) * traj.direction_e_v


def displacement_at_phase(traj: Trajectory, phase: float) -> np.ndarray:
    return traj.amplitude_d1 * _snap(math.sin(phase)) * traj.direction_e_v


@dataclass(frozen=True)
class ExperimentGeometry:
    sensor: SensorLayer
    mass: TestMass
    gap_d_gap: float                    # m
    trajectory: Trajectory
    bias_field_B0: float = 10e-3        # T
    bias_angle_theta: float = 0.0       # rad, angle between B0 and sigma_nv

    def __post_init__(self):
        if self.gap_d_gap <= 0:
            raise ValueError("gap_d_gap must be positive")
        if abs(self.trajectory.direction_e_v[2]) > UNIT_TOL:
            raise ValueError("trajectory must be lateral (direction_e_v perpendicular to the cylinder axis)")
        if self.bias_field_B0 < 0:
            raise ValueError("bias_field_B0 must be non-negative")

    @property
    def mass_z_range(self) -> tuple[float, float]:
        return (self.gap_d_gap, self.gap_d_gap + self.mass.thickness_d_tm)

    @property
    def sensor_z_range(self) -> tuple[float, float]:
        return (-self.sensor.thickness_d_nv, 0.0)
