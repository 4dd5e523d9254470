"""Physical constants used throughout the package (SI units)."""

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.054571817e-34        # J s
    c: float = 2.99792458e8              # m/s
    m_e: float = 9.1093837015e-31        # kg
    m_N: float = 1.6749e-27              # kg, neutron mass as the nucleon mass
    gamma_nv: float = 28.03e9            # Hz/T, NV gyromagnetic ratio
    mu0: float = 1.25663706212e-6        # T m/A
    eps0: float = 8.8541878128e-12       # F/m
    k_B: float = 1.380649e-23            # J/K
    mu_13C: float = 3.5e-27              # J/T, single 13C nuclear moment
    d_parallel: float = 3.5e-3           # Hz/(V/m), axial electric dipole coupling
    d_perp: float = 0.17                 # Hz/(V/m), transverse electric dipole coupling
    stress_coupling: float = 21e-3       # Hz/Pa, on-axis stress-spin coupling
    mu_air: float = 1.8e-5               # Pa s, dynamic viscosity of air
    D_zfs: float = 2.87e9                # Hz, NV ground-state zero-field splitting

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"constant {f.name} must be positive")


CONSTANTS = PhysicalConstants()
