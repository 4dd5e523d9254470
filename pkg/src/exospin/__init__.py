"""Modeling toolkit for laboratory searches for exotic spin-dependent
interactions with NV-diamond magnetometers.

Core pieces: pair-interaction kernels (compiled extension with a numpy
fallback), Monte Carlo effective-field integration, shot-noise sensitivity,
geometry optimization, exclusion-curve projection, and a systematics budget.
"""

from .constants import CONSTANTS, PhysicalConstants
from .geometry import (
    ExperimentGeometry,
    MassSpin,
    SensorLayer,
    TestMass,
    Trajectory,
    displacement_at_phase,
    peak_velocity,
    velocity_at_phase,
)
from .kernels import (
    BACKEND,
    MissingMassSpinError,
    PairContext,
    PotentialKind,
    kernel,
    kernel_batch,
    prefactor,
)
from .mc import (
    FieldEstimate,
    GeometryMismatchError,
    MCConfig,
    PhaseEstimate,
    dipole_stray_field,
    dipole_stray_gradient,
    field_amplitude,
    field_at_phase,
    magnetized_cylinder_field,
)
from .optimize import (
    ExclusionCurve,
    GeometryPreset,
    OverlayFormatError,
    PRESET_NAMES,
    SweepResult,
    UnknownPresetError,
    area_penalty,
    default_lambda_grid,
    exclusion_curve,
    overlay_import,
    preset,
    preset_from_dict,
    preset_to_dict,
    sweep,
)
from .sensitivity import (
    ProtocolTiming,
    RepIntervalTooShortError,
    SensitivityResult,
    delta_b_min,
    figure_of_merit,
    nv_responsivity,
    protocol_timings,
    signal_weighted_responsivity,
)
from .systematics import (
    BudgetAssumptions,
    BudgetEntry,
    SystematicsBudget,
    budget,
    budget_from_dict,
    budget_text,
    budget_to_dict,
    stray_field_curve,
    thermal_polarization,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetAssumptions",
    "BudgetEntry",
    "CONSTANTS",
    "ExclusionCurve",
    "ExperimentGeometry",
    "FieldEstimate",
    "GeometryMismatchError",
    "GeometryPreset",
    "MCConfig",
    "MassSpin",
    "MissingMassSpinError",
    "OverlayFormatError",
    "PRESET_NAMES",
    "PairContext",
    "PhaseEstimate",
    "PhysicalConstants",
    "PotentialKind",
    "ProtocolTiming",
    "RepIntervalTooShortError",
    "SensitivityResult",
    "SensorLayer",
    "SweepResult",
    "SystematicsBudget",
    "TestMass",
    "Trajectory",
    "UnknownPresetError",
    "area_penalty",
    "budget",
    "budget_from_dict",
    "budget_text",
    "budget_to_dict",
    "default_lambda_grid",
    "delta_b_min",
    "dipole_stray_field",
    "dipole_stray_gradient",
    "magnetized_cylinder_field",
    "displacement_at_phase",
    "exclusion_curve",
    "field_amplitude",
    "field_at_phase",
    "figure_of_merit",
    "kernel",
    "kernel_batch",
    "nv_responsivity",
    "overlay_import",
    "peak_velocity",
    "prefactor",
    "preset",
    "preset_from_dict",
    "preset_to_dict",
    "protocol_timings",
    "signal_weighted_responsivity",
    "stray_field_curve",
    "sweep",
    "thermal_polarization",
    "velocity_at_phase",
]
