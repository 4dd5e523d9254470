"""Pure-numpy batch evaluation of the pair-kernel geometric factors.

Each function takes separation vectors r (N, 3) from NV electron to test-mass
nucleon, the velocity vector v, the spin unit vectors, and the interaction
length lam, and returns the kernel without its constant prefactor (applied by
the dispatching module). Mirrors the compiled extension exactly.
"""

import numpy as np

BACKEND = "python"


def _norms(r):
    return np.sqrt(r[:, 0] ** 2 + r[:, 1] ** 2 + r[:, 2] ** 2)


def geom_v12_13(r, v, sn, st, lam):
    d = _norms(r)
    return float(np.dot(sn, v)) * np.exp(-d / lam) / d


def geom_v4_5(r, v, sn, st, lam):
    d = _norms(r)
    cx = v[1] * r[:, 2] - v[2] * r[:, 1]
    cy = v[2] * r[:, 0] - v[0] * r[:, 2]
    cz = v[0] * r[:, 1] - v[1] * r[:, 0]
    ang = (sn[0] * cx + sn[1] * cy + sn[2] * cz) / d
    return ang * (1.0 / (lam * d) + 1.0 / d**2) * np.exp(-d / lam)


def geom_v6_7(r, v, sn, st, lam):
    d = _norms(r)
    st_rhat = (st[0] * r[:, 0] + st[1] * r[:, 1] + st[2] * r[:, 2]) / d
    return float(np.dot(sn, v)) * st_rhat * (1.0 / (lam * d) + 1.0 / d**2) * np.exp(-d / lam)


def geom_v14(r, v, sn, st, lam):
    d = _norms(r)
    return float(np.dot(sn, np.cross(st, v))) * np.exp(-d / lam) / d


def geom_v15(r, v, sn, st, lam):
    d = _norms(r)
    cx = v[1] * r[:, 2] - v[2] * r[:, 1]
    cy = v[2] * r[:, 0] - v[0] * r[:, 2]
    cz = v[0] * r[:, 1] - v[1] * r[:, 0]
    sn_vxr = (sn[0] * cx + sn[1] * cy + sn[2] * cz) / d
    st_vxr = (st[0] * cx + st[1] * cy + st[2] * cz) / d
    sn_rhat = (sn[0] * r[:, 0] + sn[1] * r[:, 1] + sn[2] * r[:, 2]) / d
    st_rhat = (st[0] * r[:, 0] + st[1] * r[:, 1] + st[2] * r[:, 2]) / d
    bracket = sn_vxr * st_rhat + sn_rhat * st_vxr
    radial = 1.0 / (lam**2 * d) + 3.0 / (lam * d**2) + 3.0 / d**3
    return bracket * radial * np.exp(-d / lam)


def dipole_projection(r, m, sn):
    """sn . B-kernel of a point dipole m at separation r (field point minus
    dipole position), without the mu0/(4 pi) prefactor: [3 rhat (m.rhat) - m]/|r|^3."""
    d = _norms(r)
    m_rhat = (m[0] * r[:, 0] + m[1] * r[:, 1] + m[2] * r[:, 2]) / d
    sn_rhat = (sn[0] * r[:, 0] + sn[1] * r[:, 1] + sn[2] * r[:, 2]) / d
    return (3.0 * sn_rhat * m_rhat - float(np.dot(sn, m))) / d**3
