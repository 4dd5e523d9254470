"""NV ensemble sensitivity, figure of merit, bias-angle responsivity, and
pulse-protocol timing arithmetic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .geometry import ExperimentGeometry, SensorLayer
from .kernels import PotentialKind
from .mc import MCConfig, field_amplitude


@dataclass(frozen=True)
class SensitivityResult:
    delta_b_min: float          # T
    normalized: float           # T s^1/2 m^3/2
    v_sens: float               # m^3
    t_total: float              # s


@dataclass(frozen=True)
class ProtocolTiming:
    tau_half_spacing: float     # s, pi-pulse spacing 2*tau = 1/(2 f_m)
    n_pulses: int
    sequence_duration: float    # s
    filter_bandwidth: float     # Hz
    aliased_freq: float         # Hz
    rep_interval: float         # s


class RepIntervalTooShortError(ValueError):
    pass


def delta_b_min(sensor: SensorLayer, t: float, k: PhysicalConstants = CONSTANTS) -> SensitivityResult:
    """Minimum detectable field of the synchronized-readout scheme:
    1/(4 gamma C) / sqrt(n V_sens eta delta t tau_tot)."""
    if t <= 0:
        raise ValueError("t must be positive")
    v_sens = sensor.sensing_volume
    db = 1.0 / (4.0 * k.gamma_nv * sensor.contrast_C) / math.sqrt(
        sensor.nv_density_n * v_sens * sensor.photon_prob_eta * sensor.duty_delta * t * sensor.phase_time_tau_tot
    )
    return SensitivityResult(delta_b_min=db, normalized=db * math.sqrt(v_sens * t), v_sens=v_sens, t_total=t)


def figure_of_merit(
    geom: ExperimentGeometry,
    kind: PotentialKind,
    lam: float,
    mc: MCConfig,
    t: float,
    k: PhysicalConstants = CONSTANTS,
) -> tuple[float, float]:
    """Signal-to-noise proxy per unit coupling, |B_X/f_X| / delta_b_min.
    Returns (fom, fom standard error)."""
    est = field_amplitude(geom, kind, lam, mc, k)
    db = delta_b_min(geom.sensor, t, k).delta_b_min
    return abs(est.amplitude_per_coupling) / db, est.std_error / db


_SZ = np.diag([1.0, 0.0, -1.0])
_SX = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]) / math.sqrt(2.0)
_SZ2 = _SZ @ _SZ

DEGENERACY_GUARD_HZ = 1e3
_FD_STEP_T = 1e-7


def _transition_freq(B0: float, theta: float, b: float, k: PhysicalConstants):
    """Frequency of the ms=0 <-> +1 transition (top minus bottom eigenvalue
    of the ground-state spin Hamiltonian, in Hz) plus the upper-level gap."""
    H = k.D_zfs * _SZ2 + k.gamma_nv * (B0 * math.sin(theta) * _SX + (B0 * math.cos(theta) + b) * _SZ)
    e = np.linalg.eigvalsh(H)
    return e[2] - e[0], e[2] - e[1]


def nv_responsivity(B0: float, theta: float, k: PhysicalConstants = CONSTANTS) -> tuple[float, bool]:
    """|d f_+ / d b| at b = 0 by central finite difference, Hz/T.
    Returns (responsivity, degenerate_flag); when the two upper eigenvalues
    are within the guard the symmetric-average frequency is differentiated
    and the result flagged."""
    if B0 < 0:
        raise ValueError("B0 must be non-negative")
    h = _FD_STEP_T
    _, gap_0 = _transition_freq(B0, theta, 0.0, k)
    fp, gap_p = _transition_freq(B0, theta, h, k)
    fm, gap_m = _transition_freq(B0, theta, -h, k)
    degenerate = min(gap_0, gap_p, gap_m) < DEGENERACY_GUARD_HZ
    if degenerate:
        # half the upper-doublet average tracks the transition through the crossing
        fp -= 0.5 * gap_p
        fm -= 0.5 * gap_m
    return abs(fp - fm) / (2.0 * h), degenerate


def signal_weighted_responsivity(B0: float, theta: float, k: PhysicalConstants = CONSTANTS) -> float:
    """sin(theta) * R(theta)/R(0): the sin factor is the retained test-mass
    polarization component along the bias field."""
    if not 0.0 <= theta <= math.pi / 2.0 + 1e-12:
        raise ValueError("theta must be in [0, pi/2]")
    r0, _ = nv_responsivity(B0, 0.0, k)
    r, _ = nv_responsivity(B0, theta, k)
    return math.sin(theta) * r / r0


def protocol_timings(f_m: float, N: int, rep_interval: float) -> ProtocolTiming:
    """Timing arithmetic of the synchronized XY8-N readout."""
    if f_m <= 0:
        raise ValueError("f_m must be positive")
    if N < 1:
        raise ValueError("N must be >= 1")
    two_tau = 1.0 / (2.0 * f_m)
    n_pulses = 8 * N
    duration = n_pulses * two_tau
    if rep_interval <= duration:
        raise RepIntervalTooShortError(
            f"rep_interval {rep_interval} cannot contain the {duration} s sequence plus readout"
        )
    aliased = abs(f_m - round(f_m * rep_interval) / rep_interval)
    return ProtocolTiming(
        tau_half_spacing=two_tau,
        n_pulses=n_pulses,
        sequence_duration=duration,
        filter_bandwidth=f_m / (4.0 * N),
        aliased_freq=aliased,
        rep_interval=rep_interval,
    )
