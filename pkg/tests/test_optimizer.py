"""Geometry presets, sweeps, exclusion curves, and overlay import."""

import dataclasses
import math

import numpy as np
import pytest

from exospin import (
    CONSTANTS,
    MCConfig,
    PotentialKind,
    UnknownPresetError,
    exclusion_curve,
    overlay_import,
    preset,
    preset_from_dict,
    preset_to_dict,
    sweep,
)
from exospin.mc import BATCH_SIZE
from exospin.optimize import OverlayFormatError, PRESET_NAMES, area_penalty, default_lambda_grid

UM = 1e-6

FAST = MCConfig(seed=21, n_samples=BATCH_SIZE, target_rel_se=0.10, max_samples=8 * BATCH_SIZE)


# ------------------------------------------------------------- presets

def test_preset_names():
    assert set(PRESET_NAMES) == {
        "unpolarized-50um", "unpolarized-5um", "unpolarized-0.5um", "polarized-1um",
    }


@pytest.mark.parametrize("name,d_nv,d_gap,target", [
    ("unpolarized-50um", 62.5 * UM, 5 * UM, 50 * UM),
    ("unpolarized-5um", 6.25 * UM, 0.5 * UM, 5 * UM),
    ("unpolarized-0.5um", 0.625 * UM, 0.2 * UM, 0.5 * UM),
])
def test_unpolarized_preset_values(name, d_nv, d_gap, target):
    p = preset(name)
    g = p.geometry
    assert g.sensor.thickness_d_nv == pytest.approx(d_nv)
    assert g.gap_d_gap == pytest.approx(d_gap)
    assert p.target_lambda == pytest.approx(target)
    assert g.sensor.illum_radius_R_nv == pytest.approx(25 * UM)
    assert g.mass.radius_R_tm == pytest.approx(150 * UM)
    assert g.mass.thickness_d_tm == pytest.approx(100 * UM)
    assert g.mass.nucleon_density_rho == pytest.approx(1.6e30)
    assert g.trajectory.amplitude_d1 == pytest.approx(0.75 * UM)
    assert g.trajectory.frequency_f_m == pytest.approx(1e6)
    assert g.mass.spin is None
    assert p.measurement_time_t == pytest.approx(1e4)


def test_polarized_preset_values():
    p = preset("polarized-1um")
    g = p.geometry
    assert p.target_lambda == pytest.approx(1 * UM)
    assert g.mass.thickness_d_tm == pytest.approx(2 * UM)
    assert g.gap_d_gap == pytest.approx(0.5 * UM)
    assert g.sensor.thickness_d_nv == pytest.approx(1.25 * UM)
    assert g.mass.spin is not None
    assert g.mass.spin.polarized_density_rho_s == pytest.approx(5e25)
    assert g.mass.spin.nuclear_moment == pytest.approx(3.5e-27)
    assert g.bias_angle_theta == pytest.approx(math.radians(80.0))


def test_preset_orientation_depends_on_kind():
    p12 = preset("unpolarized-5um", PotentialKind.V12_13)
    p45 = preset("unpolarized-5um", PotentialKind.V4_5)
    # motion along the NV axis for V12+13, perpendicular for V4+5
    assert np.dot(p12.geometry.sensor.sigma_nv, p12.geometry.trajectory.direction_e_v) == pytest.approx(1.0)
    assert np.dot(p45.geometry.sensor.sigma_nv, p45.geometry.trajectory.direction_e_v) == pytest.approx(0.0)


def test_unknown_preset():
    with pytest.raises(UnknownPresetError):
        preset("unpolarized-7um")


def test_preset_round_trip():
    for name in PRESET_NAMES:
        p = preset(name)
        q = preset_from_dict(preset_to_dict(p))
        assert preset_to_dict(q) == preset_to_dict(p)
        assert q.name == p.name and q.target_lambda == p.target_lambda


# ------------------------------------------------------------- sweeps

def test_sweep_rejects_bad_grid():
    p = preset("unpolarized-5um", PotentialKind.V12_13)
    with pytest.raises(ValueError):
        sweep(p, PotentialKind.V12_13, 5 * UM, "d_nv", [1 * UM, 2 * UM], FAST)
    with pytest.raises(ValueError):
        sweep(p, PotentialKind.V12_13, 5 * UM, "d_nv",
              [1 * UM, 2 * UM, 2 * UM, 3 * UM, 4 * UM], FAST)
    with pytest.raises(ValueError):
        sweep(p, PotentialKind.V12_13, 5 * UM, "bogus",
              [1 * UM, 2 * UM, 3 * UM, 4 * UM, 5 * UM], FAST)


def test_sweep_normalized_peak_is_one():
    p = preset("unpolarized-5um", PotentialKind.V12_13)
    lam = 5 * UM
    res = sweep(p, PotentialKind.V12_13, lam, "d_gap",
                [0.05 * lam, 0.1 * lam, 0.3 * lam, 0.6 * lam, 1.0 * lam], FAST)
    assert max(res.fom_normalized) == pytest.approx(1.0, rel=1e-12)
    assert len(res.grid) == len(res.fom_normalized) == len(res.mc_errors) == 5
    # d_gap curve decreases
    assert all(b < a + 3 * e for a, b, e in zip(res.fom_normalized, res.fom_normalized[1:], res.mc_errors[1:]))


# ------------------------------------------------------------- exclusion

def test_exclusion_argmin_matches_target_lambda():
    """Across the three unpolarized presets, each lambda's best bound comes
    from the preset tuned to it."""
    grid = [0.5 * UM, 5 * UM, 50 * UM]
    cfg = MCConfig(seed=31, n_samples=8 * BATCH_SIZE, target_rel_se=0.03,
                   max_samples=64 * BATCH_SIZE)
    curves = {}
    for name in ("unpolarized-0.5um", "unpolarized-5um", "unpolarized-50um"):
        curves[name] = exclusion_curve(PotentialKind.V12_13, preset(name, PotentialKind.V12_13),
                                       grid, cfg)
    for i, lam in enumerate(grid):
        best = min(curves, key=lambda n: curves[n].f_min[i])
        assert preset(best).target_lambda == pytest.approx(lam)


def test_exclusion_time_scaling():
    p = preset("unpolarized-5um", PotentialKind.V12_13)
    grid = [5 * UM]
    a = exclusion_curve(PotentialKind.V12_13, p, grid, FAST, t=1e4)
    b = exclusion_curve(PotentialKind.V12_13, p, grid, FAST, t=4e4)
    assert b.f_min[0] == pytest.approx(a.f_min[0] / 2, rel=1e-12)


def test_exclusion_contrast_scaling():
    p = preset("unpolarized-5um", PotentialKind.V12_13)
    doubled = dataclasses.replace(
        p, geometry=dataclasses.replace(
            p.geometry,
            sensor=dataclasses.replace(p.geometry.sensor, contrast_C=0.06)))
    grid = [5 * UM]
    a = exclusion_curve(PotentialKind.V12_13, p, grid, FAST)
    b = exclusion_curve(PotentialKind.V12_13, doubled, grid, FAST)
    assert b.f_min[0] == pytest.approx(a.f_min[0] / 2, rel=1e-12)


def test_exclusion_rejects_bad_grid():
    p = preset("unpolarized-5um", PotentialKind.V12_13)
    with pytest.raises(ValueError):
        exclusion_curve(PotentialKind.V12_13, p, [5 * UM, 1 * UM], FAST)
    with pytest.raises(ValueError):
        exclusion_curve(PotentialKind.V12_13, p, [-1 * UM, 5 * UM], FAST)


def test_exclusion_entries_positive_and_consistent():
    p = preset("unpolarized-5um", PotentialKind.V12_13)
    c = exclusion_curve(PotentialKind.V12_13, p, [2 * UM, 5 * UM], FAST)
    from exospin import delta_b_min
    db = delta_b_min(p.geometry.sensor, c.t_total).delta_b_min
    for f, b in zip(c.f_min, c.field_per_coupling):
        assert f > 0 and b > 0
        assert f == pytest.approx(db / b, rel=1e-12)


def test_default_lambda_grid():
    grid = default_lambda_grid()
    assert grid[0] == pytest.approx(0.1 * UM)
    assert grid[-1] == pytest.approx(1e-3)
    assert len(grid) == 81
    ratios = np.diff(np.log10(grid))
    np.testing.assert_allclose(ratios, ratios[0])


# ------------------------------------------------------------- area penalty

def test_area_penalty_identity_when_spot_unchanged():
    p = preset("unpolarized-5um", PotentialKind.V12_13)
    # numerator and denominator use the same spot when 0.05 R_tm = R_nv
    widened = dataclasses.replace(
        p, geometry=dataclasses.replace(
            p.geometry,
            mass=dataclasses.replace(p.geometry.mass, radius_R_tm=20 * 25 * UM)))
    assert area_penalty(widened, PotentialKind.V12_13, 5 * UM, FAST) == pytest.approx(1.0, rel=1e-12)


def test_area_penalty_at_least_one():
    p = preset("unpolarized-5um", PotentialKind.V12_13)
    assert area_penalty(p, PotentialKind.V12_13, 5 * UM, FAST) >= 1.0 - 0.05


# ------------------------------------------------------------- overlay import

def test_overlay_two_line_csv(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("lambda_m,f\n1e-6,2e-10\n")
    assert overlay_import(f) == [(1e-6, 2e-10)]


def test_overlay_missing_header(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("wavelength,coupling\n1e-6,2e-10\n")
    with pytest.raises(OverlayFormatError):
        overlay_import(f)


def test_overlay_non_numeric_reports_line(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("lambda_m,f\n1e-6,2e-10\n1e-5,oops\n")
    with pytest.raises(OverlayFormatError, match=":3"):
        overlay_import(f)
