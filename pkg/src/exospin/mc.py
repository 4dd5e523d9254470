"""Monte Carlo estimation of the volume-averaged effective field per unit
coupling, with reproducible counter-based seeding and standard errors.

Sampling is organized in fixed-size batches. Each batch owns an RNG stream
derived from (seed, batch_index), so the same batch always draws the same
pairs; the same draws are reused at every trajectory phase (common random
numbers, which makes the Fourier-quadrature error a paired estimator).
Batches are reduced in index order, so results are bit-identical for any
worker count. Convergence is checked at fixed batch-count checkpoints.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .geometry import ExperimentGeometry, peak_velocity, _snap
from .kernels import PotentialKind, kernel_batch

BATCH_SIZE = 65536
# convergence checked every CHECK_EVERY batches, independent of worker count
CHECK_EVERY = 4


class GeometryMismatchError(ValueError):
    """Geometry lacks the polarized mass required by the requested kind."""


@dataclass(frozen=True)
class MCConfig:
    seed: int = 1
    n_samples: int = 2 * BATCH_SIZE         # minimum samples before convergence can stop
    n_phase_points: int = 8
    target_rel_se: float = 0.01
    max_samples: int = 2**25

    def __post_init__(self):
        if self.n_phase_points < 8 or self.n_phase_points % 2 != 0:
            raise ValueError("n_phase_points must be even and >= 8")
        if not 0 < self.target_rel_se < 1:
            raise ValueError("target_rel_se must be in (0, 1)")
        if self.n_samples <= 0 or self.max_samples < self.n_samples:
            raise ValueError("need 0 < n_samples <= max_samples")


@dataclass(frozen=True)
class PhaseEstimate:
    value: float                            # T per unit coupling
    std_error: float
    samples_used: int
    converged: bool


@dataclass(frozen=True)
class FieldEstimate:
    amplitude_per_coupling: float           # T, fundamental cosine quadrature
    std_error: float
    per_phase_values: list                  # of (phase, B_per_coupling, se)
    seed_used: int
    samples_used: int
    converged: bool
    sine_amplitude: float = 0.0             # displacement-quadrature diagnostic


def n_workers() -> int:
    env = os.environ.get("EXOSPIN_THREADS", "")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _rng_for_batch(seed: int, batch_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(batch_index,))
    return np.random.Generator(np.random.Philox(ss))


def sample_cylinder(rng, radius, z_min, z_max, lateral_center=(0.0, 0.0), n=1):
    """Uniform points in a cylinder, rejection-free: radius via sqrt of a
    uniform, angle uniform, z uniform. Returns (n, 3)."""
    if radius <= 0 or z_max <= z_min:
        raise ValueError("need radius > 0 and z_max > z_min")
    u = rng.random(n)
    theta = rng.random(n) * 2.0 * math.pi
    z = z_min + rng.random(n) * (z_max - z_min)
    r = radius * np.sqrt(u)
    pts = np.empty((n, 3))
    pts[:, 0] = lateral_center[0] + r * np.cos(theta)
    pts[:, 1] = lateral_center[1] + r * np.sin(theta)
    pts[:, 2] = z
    return pts


def _density(geom: ExperimentGeometry, kind: PotentialKind) -> float:
    if kind.requires_polarized_mass:
        if geom.mass.spin is None:
            raise GeometryMismatchError(f"{kind.value} requires a polarized test mass")
        return geom.mass.spin.polarized_density_rho_s
    return geom.mass.nucleon_density_rho


def _phase_grid(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    phases = 2.0 * math.pi * np.arange(n) / n
    cosines = np.array([_snap(math.cos(p)) for p in phases])
    sines = np.array([_snap(math.sin(p)) for p in phases])
    return phases, cosines, sines


def _batch_moments(geom, kind, lam, seed, batch_index, cosines, sines, k):
    """Per-phase kernel sums for one batch plus the per-sample quadrature
    amplitudes; everything deterministic in (seed, batch_index)."""
    rng = _rng_for_batch(seed, batch_index)
    nv = sample_cylinder(rng, geom.sensor.illum_radius_R_nv, -geom.sensor.thickness_d_nv, 0.0, n=BATCH_SIZE)
    tm = sample_cylinder(rng, geom.mass.radius_R_tm, *geom.mass_z_range, n=BATCH_SIZE)
    base = tm - nv

    e_v = geom.trajectory.direction_e_v
    v0 = peak_velocity(geom.trajectory)
    d1 = geom.trajectory.amplitude_d1
    sigma_tm = None if geom.mass.spin is None else geom.mass.spin.sigma_tm

    nphase = len(cosines)
    scale = _density(geom, kind) * geom.mass.volume
    sums = np.zeros(nphase)
    sumsqs = np.zeros(nphase)
    amp_cos = np.zeros(BATCH_SIZE)
    amp_sin = np.zeros(BATCH_SIZE)
    for j in range(nphase):
        if cosines[j] == 0.0:
            continue  # v = 0, every kernel vanishes exactly
        r = base + (d1 * sines[j]) * e_v
        v = (v0 * cosines[j]) * e_v
        y = scale * kernel_batch(kind, r, v, geom.sensor.sigma_nv, sigma_tm, lam, k)
        sums[j] = y.sum()
        sumsqs[j] = np.dot(y, y)
        amp_cos += y * cosines[j]
        amp_sin += y * sines[j]
    amp_cos *= 2.0 / nphase
    amp_sin *= 2.0 / nphase
    return sums, sumsqs, amp_cos.sum(), np.dot(amp_cos, amp_cos), amp_sin.sum()


def _mean_se(total, total_sq, n):
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


def field_amplitude(
    geom: ExperimentGeometry,
    kind: PotentialKind,
    lam: float,
    mc: MCConfig,
    k: PhysicalConstants = CONSTANTS,
) -> FieldEstimate:
    """Fundamental cosine-quadrature amplitude of B(t)/f_X over the uniform
    phase grid, with batch sampling until the amplitude's relative standard
    error reaches mc.target_rel_se."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    _density(geom, kind)  # validate kind vs geometry up front
    phases, cosines, sines = _phase_grid(mc.n_phase_points)

    nphase = mc.n_phase_points
    sums = np.zeros(nphase)
    sumsqs = np.zeros(nphase)
    a_sum = a_sq = s_sum = 0.0
    n_done = 0
    converged = False
    next_batch = 0
    min_batches = math.ceil(mc.n_samples / BATCH_SIZE)
    max_batches = math.ceil(mc.max_samples / BATCH_SIZE)

    with ThreadPoolExecutor(max_workers=n_workers()) as pool:
        while next_batch < max_batches and not converged:
            todo = list(range(next_batch, min(next_batch + CHECK_EVERY, max_batches)))
            results = list(pool.map(
                lambda b: _batch_moments(geom, kind, lam, mc.seed, b, cosines, sines, k), todo,
            ))
            for bs, bq, ac, acq, asn in results:  # fixed order: batch index
                sums += bs
                sumsqs += bq
                a_sum += ac
                a_sq += acq
                s_sum += asn
                n_done += BATCH_SIZE
            next_batch = todo[-1] + 1
            if n_done >= mc.n_samples * 1:
                amp, amp_se = _mean_se(a_sum, a_sq, n_done)
                if amp == 0.0 and amp_se == 0.0:
                    converged = True
                elif amp != 0.0 and amp_se / abs(amp) <= mc.target_rel_se:
                    converged = True

    amp, amp_se = _mean_se(a_sum, a_sq, n_done)
    per_phase = []
    for j in range(nphase):
        m, se = _mean_se(sums[j], sumsqs[j], n_done)
        per_phase.append((float(phases[j]), m, se))
    return FieldEstimate(
        amplitude_per_coupling=amp,
        std_error=amp_se,
        per_phase_values=per_phase,
        seed_used=mc.seed,
        samples_used=n_done,
        converged=converged,
        sine_amplitude=s_sum / n_done,
    )


def field_at_phase(
    geom: ExperimentGeometry,
    kind: PotentialKind,
    lam: float,
    phase: float,
    mc: MCConfig,
    k: PhysicalConstants = CONSTANTS,
) -> PhaseEstimate:
    """B(phase)/f_X with its standard error; batch sampling until
    se/|B| <= mc.target_rel_se or mc.max_samples is reached."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    _density(geom, kind)
    c = _snap(math.cos(phase))
    s = _snap(math.sin(phase))
    cosines = np.array([c])
    sines = np.array([s])

    total = total_sq = 0.0
    n_done = 0
    converged = False
    next_batch = 0
    min_batches = math.ceil(mc.n_samples / BATCH_SIZE)
    max_batches = math.ceil(mc.max_samples / BATCH_SIZE)

    with ThreadPoolExecutor(max_workers=n_workers()) as pool:
        while next_batch < max_batches and not converged:
            todo = list(range(next_batch, min(next_batch + CHECK_EVERY, max_batches)))
            results = list(pool.map(
                lambda b: _batch_moments(geom, kind, lam, mc.seed, b, cosines, sines, k), todo,
            ))
            for bs, bq, _ac, _acq, _asn in results:
                total += bs[0]
                total_sq += bq[0]
                n_done += BATCH_SIZE
            next_batch = todo[-1] + 1
            if n_done >= mc.n_samples:
                mean, se = _mean_se(total, total_sq, n_done)
                if (mean == 0.0 and se == 0.0) or (mean != 0.0 and se / abs(mean) <= mc.target_rel_se):
                    converged = True

    mean, se = _mean_se(total, total_sq, n_done)
    return PhaseEstimate(value=mean, std_error=se, samples_used=n_done, converged=converged)


# 64-point Gauss-Legendre rule mapped to [0, 1], for the face ring integrals
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)
_GL01_X = 0.5 * (_GL_X + 1.0)
_GL01_W = 0.5 * _GL_W
_WALL_N_PHI = 64
_WALL_N_Z = 4


def magnetized_cylinder_field(
    points: np.ndarray,
    center_xy: np.ndarray,
    radius: float,
    z_range: tuple[float, float],
    m_vec: np.ndarray,
    k: PhysicalConstants = CONSTANTS,
) -> np.ndarray:
    """Magnetic field (T, shape (n, 3)) of a uniformly magnetized cylinder at
    exterior points, through the equivalent surface-charge picture: the axial
    magnetization component becomes uniformly charged end faces and the
    transverse component a cos(phi) wall charge.

    The lateral field is a near-total cancellation between opposing parts of
    each face, so sampling dipoles over the mass volume cannot resolve it.
    Instead the azimuthal integral over each ring of a face is taken in closed
    form: rings entirely inside the face contribute exactly zero laterally,
    leaving a well-conditioned 1-D radial integral over the boundary band."""
    p = np.ascontiguousarray(points, dtype=np.float64)
    m_vec = np.asarray(m_vec, dtype=np.float64)
    z0, z1 = float(z_range[0]), float(z_range[1])
    pref = k.mu0 / (4.0 * math.pi)
    out = np.zeros_like(p)

    cvec = np.asarray(center_xy, dtype=np.float64)[:2] - p[:, :2]
    c = np.hypot(cvec[:, 0], cvec[:, 1])
    safe_c = np.maximum(c, 1e-300)
    chat = cvec / safe_c[:, None]

    m_z = float(m_vec[2])
    if m_z != 0.0:
        s_lo = np.abs(radius - c)
        width = (radius + c) - s_lo
        s = s_lo[:, None] + width[:, None] * _GL01_X
        w = width[:, None] * _GL01_W
        cos_a = (s * s + (c * c - radius * radius)[:, None]) / (2.0 * s * safe_c[:, None])
        alpha = np.arccos(np.clip(cos_a, -1.0, 1.0))
        sin_a = np.sin(alpha)
        for z_f, sigma in ((z1, m_z), (z0, -m_z)):
            h = p[:, 2] - z_f
            inv32 = (s * s + (h * h)[:, None]) ** -1.5
            band_z = np.einsum("ij,ij->i", w, 2.0 * s * alpha * inv32)
            band_t = np.einsum("ij,ij->i", w, 2.0 * s * s * sin_a * inv32)
            inner = np.where(
                c < radius,
                2.0 * math.pi
                * (1.0 / np.maximum(np.abs(h), 1e-300) - 1.0 / np.hypot(radius - c, h)),
                0.0,
            )
            bz = pref * sigma * h * (inner + band_z)
            bt = -pref * sigma * band_t
            out[:, 0] += bt * chat[:, 0]
            out[:, 1] += bt * chat[:, 1]
            out[:, 2] += bz

    m_t = math.hypot(float(m_vec[0]), float(m_vec[1]))
    if m_t != 0.0:
        phi = 2.0 * math.pi * (np.arange(_WALL_N_PHI) + 0.5) / _WALL_N_PHI
        zq, zw = np.polynomial.legendre.leggauss(_WALL_N_Z)
        zw = 0.5 * (z1 - z0) * zw
        zq = 0.5 * (z0 + z1) + 0.5 * (z1 - z0) * zq
        cos_p, sin_p = np.cos(phi), np.sin(phi)
        # source points and cos(phi)-weighted charges on the wall
        sx = np.asarray(center_xy, dtype=np.float64)[0] + radius * cos_p
        sy = np.asarray(center_xy, dtype=np.float64)[1] + radius * sin_p
        sigma_w = m_vec[0] * cos_p + m_vec[1] * sin_p
        dphi = 2.0 * math.pi / _WALL_N_PHI
        src = np.empty((_WALL_N_PHI * _WALL_N_Z, 3))
        wgt = np.empty(_WALL_N_PHI * _WALL_N_Z)
        for i, (zz, zwi) in enumerate(zip(zq, zw)):
            sl = slice(i * _WALL_N_PHI, (i + 1) * _WALL_N_PHI)
            src[sl, 0], src[sl, 1], src[sl, 2] = sx, sy, zz
            wgt[sl] = sigma_w * radius * dphi * zwi
        chunk = 16384
        for lo in range(0, p.shape[0], chunk):
            d = p[lo:lo + chunk, None, :] - src[None, :, :]
            r3 = np.einsum("ijk,ijk->ij", d, d) ** -1.5
            out[lo:lo + chunk] += pref * np.einsum("j,ij,ijk->ik", wgt, r3, d)
    return out


def _stray_projection(geom, m_vec, displacement, batch_index, mc, k):
    """sigma_nv . B at one batch of NV sample points, mass displaced along e_v."""
    rng = _rng_for_batch(mc.seed, batch_index)
    nv = sample_cylinder(
        rng, geom.sensor.illum_radius_R_nv, -geom.sensor.thickness_d_nv, 0.0, n=BATCH_SIZE
    )
    center = displacement * geom.trajectory.direction_e_v[:2]
    b = magnetized_cylinder_field(nv, center, geom.mass.radius_R_tm, geom.mass_z_range, m_vec, k)
    return nv, b @ geom.sensor.sigma_nv


def _check_stray_args(geom, magnetization_M):
    if magnetization_M < 0:
        raise ValueError("magnetization_M must be non-negative")
    if geom.mass.spin is None:
        raise GeometryMismatchError("dipole_stray_field requires a polarized test mass")


def dipole_stray_field(
    geom: ExperimentGeometry,
    magnetization_M: float,
    displacement: float,
    mc: MCConfig,
    k: PhysicalConstants = CONSTANTS,
) -> tuple[float, float]:
    """Volume-averaged sigma_nv . B of the uniformly magnetized test mass
    (magnetization M along sigma_tm), mass displaced laterally along e_v.
    The cylinder field is evaluated per NV sample point by
    magnetized_cylinder_field; only the NV volume average is Monte Carlo.
    Fixed sample count (mc.n_samples rounded up to whole batches); identical
    seeds share draws across displacements. Returns (B, se) in Tesla."""
    _check_stray_args(geom, magnetization_M)
    if magnetization_M == 0.0:
        return 0.0, 0.0
    m_vec = magnetization_M * geom.mass.spin.sigma_tm
    n_batches = math.ceil(mc.n_samples / BATCH_SIZE)

    def one(b):
        _, y = _stray_projection(geom, m_vec, displacement, b, mc, k)
        return y.sum(), np.dot(y, y)

    total = total_sq = 0.0
    with ThreadPoolExecutor(max_workers=n_workers()) as pool:
        for bs, bq in pool.map(one, range(n_batches)):
            total += bs
            total_sq += bq
    n = n_batches * BATCH_SIZE
    mean, se = _mean_se(total, total_sq, n)
    return mean, se


def dipole_stray_gradient(
    geom: ExperimentGeometry,
    magnetization_M: float,
    mc: MCConfig,
    k: PhysicalConstants = CONSTANTS,
    delta: float = 0.1e-6,
) -> tuple[float, float]:
    """Central-difference d<sigma_nv . B>/dx of the stray field at zero
    displacement, as a paired estimator: both displaced fields are evaluated
    at the same NV sample points, so the common field value cancels
    sample-by-sample and the standard error reflects only the difference.
    Returns (gradient, se) in T/m."""
    _check_stray_args(geom, magnetization_M)
    if magnetization_M == 0.0:
        return 0.0, 0.0
    m_vec = magnetization_M * geom.mass.spin.sigma_tm
    n_batches = math.ceil(mc.n_samples / BATCH_SIZE)

    def one(b):
        _, y_p = _stray_projection(geom, m_vec, +delta, b, mc, k)
        _, y_m = _stray_projection(geom, m_vec, -delta, b, mc, k)
        g = (y_p - y_m) / (2.0 * delta)
        return g.sum(), np.dot(g, g)

    total = total_sq = 0.0
    with ThreadPoolExecutor(max_workers=n_workers()) as pool:
        for bs, bq in pool.map(one, range(n_batches)):
            total += bs
            total_sq += bq
    n = n_batches * BATCH_SIZE
    return _mean_se(total, total_sq, n)
