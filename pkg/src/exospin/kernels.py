"""Pair kernels for the five hypothetical interactions.

Each kernel kappa_X(ctx) has units T m^3 and is defined so that the
effective field per unit coupling is B_X / f_X = rho * integral of kappa_X
over the test-mass volume, averaged over the NV volume. For the
spin-velocity interactions rho is the nucleon density; for the
velocity-dependent spin-spin interactions it is the polarized-spin density.

The hot batch evaluation is served by a compiled extension when available,
with a pure-python fallback selected at import (override with
EXOSPIN_BACKEND=python|cython).
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from . import _kernels_py

_backend_choice = os.environ.get("EXOSPIN_BACKEND", "")
if _backend_choice == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        if _backend_choice == "cython":
            raise
        _impl = _kernels_py

BACKEND = _impl.BACKEND


class PotentialKind(enum.Enum):
    V12_13 = "v12_13"
    V4_5 = "v4_5"
    V6_7 = "v6_7"
    V14 = "v14"
    V15 = "v15"

    @property
    def requires_polarized_mass(self) -> bool:
        return self in (PotentialKind.V6_7, PotentialKind.V14, PotentialKind.V15)

    @property
    def coupling_symbol(self) -> str:
        return {
            PotentialKind.V12_13: "f_12+13",
            PotentialKind.V4_5: "f_4+5",
            PotentialKind.V6_7: "f_6+7",
            PotentialKind.V14: "f_14",
            PotentialKind.V15: "f_15",
        }[self]


class MissingMassSpinError(ValueError):
    """Raised when a spin-spin kernel is evaluated without sigma_tm."""


@dataclass(frozen=True)
class PairContext:
    r_vec: np.ndarray                   # m, from NV electron to test-mass nucleon
    v_vec: np.ndarray                   # m/s
    sigma_nv: np.ndarray                # unit vector
    lam: float                          # m
    sigma_tm: np.ndarray | None = None  # unit vector, spin-spin kernels only

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")
        if np.linalg.norm(self.r_vec) == 0:
            raise ValueError("r_vec must be non-zero")


def prefactor(kind: PotentialKind, k: PhysicalConstants = CONSTANTS) -> float:
    """Constant multiplying the geometric factor of each kernel, in units
    that make kappa come out in T m^3. The 1/gamma Tesla conversion is
    applied uniformly to all five kernels."""
    g = k.gamma_nv
    if kind is PotentialKind.V12_13:
        return 1.0 / (4.0 * math.pi * g)
    if kind is PotentialKind.V4_5:
        return -k.hbar / (4.0 * math.pi * k.m_e * k.c * g)
    if kind is PotentialKind.V6_7:
        return -k.hbar / (4.0 * math.pi * k.m_e * k.c * g)
    if kind is PotentialKind.V14:
        return 1.0 / (2.0 * math.pi * g)
    if kind is PotentialKind.V15:
        return -k.hbar**2 / (4.0 * math.pi * g * k.m_e * k.m_N * k.c**2)
    raise ValueError(f"unknown kind {kind}")


_GEOM_FUNCS = {
    PotentialKind.V12_13: "geom_v12_13",
    PotentialKind.V4_5: "geom_v4_5",
    PotentialKind.V6_7: "geom_v6_7",
    PotentialKind.V14: "geom_v14",
    PotentialKind.V15: "geom_v15",
}

_ZERO3 = np.zeros(3)


def _writable_c(a, dtype=float):
    out = np.ascontiguousarray(a, dtype=dtype)
    if not out.flags.writeable:
        out = out.copy()
    return out


def kernel_batch(
    kind: PotentialKind,
    r: np.ndarray,
    v: np.ndarray,
    sigma_nv: np.ndarray,
    sigma_tm: np.ndarray | None,
    lam: float,
    k: PhysicalConstants = CONSTANTS,
) -> np.ndarray:
    """kappa_X for a batch of separation vectors r (N, 3). T m^3."""
    if kind.requires_polarized_mass and sigma_tm is None:
        raise MissingMassSpinError(f"{kind.value} requires a polarized test mass (sigma_tm)")
    st = _ZERO3.copy() if sigma_tm is None else _writable_c(sigma_tm)
    geom = getattr(_impl, _GEOM_FUNCS[kind])(
        _writable_c(r),
        _writable_c(v),
        _writable_c(sigma_nv),
        st,
        float(lam),
    )
    return prefactor(kind, k) * geom


def kernel(kind: PotentialKind, ctx: PairContext, k: PhysicalConstants = CONSTANTS) -> float:
    out = kernel_batch(kind, ctx.r_vec.reshape(1, 3), ctx.v_vec, ctx.sigma_nv, ctx.sigma_tm, ctx.lam, k)
    return float(out[0])


def kernel_v12_13(ctx: PairContext, k: PhysicalConstants = CONSTANTS) -> float:
    return kernel(PotentialKind.V12_13, ctx, k)


def kernel_v4_5(ctx: PairContext, k: PhysicalConstants = CONSTANTS) -> float:
    return kernel(PotentialKind.V4_5, ctx, k)


def kernel_v6_7(ctx: PairContext, k: PhysicalConstants = CONSTANTS) -> float:
    return kernel(PotentialKind.V6_7, ctx, k)


def kernel_v14(ctx: PairContext, k: PhysicalConstants = CONSTANTS) -> float:
    return kernel(PotentialKind.V14, ctx, k)


def kernel_v15(ctx: PairContext, k: PhysicalConstants = CONSTANTS) -> float:
    return kernel(PotentialKind.V15, ctx, k)


def dipole_projection_batch(r: np.ndarray, m: np.ndarray, sigma_nv: np.ndarray) -> np.ndarray:
    """sigma_nv . [3 rhat (m.rhat) - m]/|r|^3 for a batch of separations
    (field point minus dipole position); mu0/(4 pi) applied by the caller."""
    return _impl.dipole_projection(
        _writable_c(r),
        _writable_c(m),
        _writable_c(sigma_nv),
    )
