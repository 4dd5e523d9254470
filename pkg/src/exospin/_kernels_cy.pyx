# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluation of the pair-kernel geometric factors.

Same contract as _kernels_py: separation vectors r (N, 3), velocity v,
spin unit vectors, interaction length lam; returns the kernel without its
constant prefactor. Loops release the GIL so batches can run in threads.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

BACKEND = "cython"


def geom_v12_13(double[:, ::1] r, double[::1] v, double[::1] sn, double[::1] st, double lam):
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double sv = sn[0] * v[0] + sn[1] * v[1] + sn[2] * v[2]
    cdef double d
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            d = sqrt(r[i, 0] * r[i, 0] + r[i, 1] * r[i, 1] + r[i, 2] * r[i, 2])
            out[i] = sv * exp(-d / lam) / d
    return out_arr


def geom_v4_5(double[:, ::1] r, double[::1] v, double[::1] sn, double[::1] st, double lam):
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double d, cx, cy, cz, ang
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            d = sqrt(r[i, 0] * r[i, 0] + r[i, 1] * r[i, 1] + r[i, 2] * r[i, 2])
            cx = v[1] * r[i, 2] - v[2] * r[i, 1]
            cy = v[2] * r[i, 0] - v[0] * r[i, 2]
            cz = v[0] * r[i, 1] - v[1] * r[i, 0]
            ang = (sn[0] * cx + sn[1] * cy + sn[2] * cz) / d
            out[i] = ang * (1.0 / (lam * d) + 1.0 / (d * d)) * exp(-d / lam)
    return out_arr


def geom_v6_7(double[:, ::1] r, double[::1] v, double[::1] sn, double[::1] st, double lam):
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double sv = sn[0] * v[0] + sn[1] * v[1] + sn[2] * v[2]
    cdef double d, st_rhat
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            d = sqrt(r[i, 0] * r[i, 0] + r[i, 1] * r[i, 1] + r[i, 2] * r[i, 2])
            st_rhat = (st[0] * r[i, 0] + st[1] * r[i, 1] + st[2] * r[i, 2]) / d
            out[i] = sv * st_rhat * (1.0 / (lam * d) + 1.0 / (d * d)) * exp(-d / lam)
    return out_arr


def geom_v14(double[:, ::1] r, double[::1] v, double[::1] sn, double[::1] st, double lam):
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double cxv = st[1] * v[2] - st[2] * v[1]
    cdef double cyv = st[2] * v[0] - st[0] * v[2]
    cdef double czv = st[0] * v[1] - st[1] * v[0]
    cdef double sv = sn[0] * cxv + sn[1] * cyv + sn[2] * czv
    cdef double d
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            d = sqrt(r[i, 0] * r[i, 0] + r[i, 1] * r[i, 1] + r[i, 2] * r[i, 2])
            out[i] = sv * exp(-d / lam) / d
    return out_arr


def geom_v15(double[:, ::1] r, double[::1] v, double[::1] sn, double[::1] st, double lam):
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double d, cx, cy, cz, sn_vxr, st_vxr, sn_rhat, st_rhat, bracket, radial
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            d = sqrt(r[i, 0] * r[i, 0] + r[i, 1] * r[i, 1] + r[i, 2] * r[i, 2])
            cx = v[1] * r[i, 2] - v[2] * r[i, 1]
            cy = v[2] * r[i, 0] - v[0] * r[i, 2]
            cz = v[0] * r[i, 1] - v[1] * r[i, 0]
            sn_vxr = (sn[0] * cx + sn[1] * cy + sn[2] * cz) / d
            st_vxr = (st[0] * cx + st[1] * cy + st[2] * cz) / d
            sn_rhat = (sn[0] * r[i, 0] + sn[1] * r[i, 1] + sn[2] * r[i, 2]) / d
            st_rhat = (st[0] * r[i, 0] + st[1] * r[i, 1] + st[2] * r[i, 2]) / d
            bracket = sn_vxr * st_rhat + sn_rhat * st_vxr
            radial = 1.0 / (lam * lam * d) + 3.0 / (lam * d * d) + 3.0 / (d * d * d)
            out[i] = bracket * radial * exp(-d / lam)
    return out_arr


def dipole_projection(double[:, ::1] r, double[::1] m, double[::1] sn):
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double sm = sn[0] * m[0] + sn[1] * m[1] + sn[2] * m[2]
    cdef double d, m_rhat, sn_rhat
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            d = sqrt(r[i, 0] * r[i, 0] + r[i, 1] * r[i, 1] + r[i, 2] * r[i, 2])
            m_rhat = (m[0] * r[i, 0] + m[1] * r[i, 1] + m[2] * r[i, 2]) / d
            sn_rhat = (sn[0] * r[i, 0] + sn[1] * r[i, 1] + sn[2] * r[i, 2]) / d
            out[i] = (3.0 * sn_rhat * m_rhat - sm) / (d * d * d)
    return out_arr
