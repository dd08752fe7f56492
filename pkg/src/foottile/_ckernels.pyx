# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``.

Keep the arithmetic in the same order as the Python fallback; the test
suite checks both backends against each other.
"""
from libc.math cimport cos, sin, isfinite

import numpy as np

BISECTION_STEPS = 64


def invert_cubic(double c3, double c2, double c1, double c0, double scale,
                 targets, int steps=64):
    cdef double[::1] t = np.ascontiguousarray(targets, dtype=np.float64).ravel()
    out_arr = np.empty(t.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j
    cdef int s
    cdef double lo, hi, mid, f
    for j in range(t.shape[0]):
        lo = 0.0
        hi = 1.0
        for s in range(steps):
            mid = 0.5 * (lo + hi)
            f = scale * (((c3 * mid + c2) * mid + c1) * mid + c0)
            if f < t[j]:
                lo = mid
            else:
                hi = mid
        out[j] = 0.5 * (lo + hi)
    return out_arr.reshape(np.shape(targets))


def hop_integrate(double dt, Py_ssize_t n_steps, double body_mass, double foot_mass,
                  double gravity, double leg_stiffness, double leg_damping,
                  double leg_length, double z_foot0, double z_body0, double alpha0,
                  double[::1] targets, double servo_omega, double[::1] tile_angles,
                  double segment_radius, double dome_radius, double k_depth,
                  double c_vel, double yield_depth,
                  double[::1] z_foot, double[::1] v_foot, double[::1] z_body,
                  double[::1] v_body, double[::1] alpha, double[::1] alpha_dot,
                  double[:, ::1] forces, long[::1] hop_index):
    cdef Py_ssize_t n_tiles = tile_angles.shape[0]
    cdef Py_ssize_t n_targets = targets.shape[0]
    cdef double zf = z_foot0, vf = 0.0, zb = z_body0, vb = 0.0
    cdef double a = alpha0, ad = 0.0
    cdef long hop = 0
    cdef bint touched = False
    cdef double w2 = servo_omega * servo_omega
    cdef double total, phi, depth, rate, f, spring, vb_new
    cdef Py_ssize_t i, k
    for i in range(n_steps + 1):
        z_foot[i] = zf
        v_foot[i] = vf
        z_body[i] = zb
        v_body[i] = vb
        alpha[i] = a
        alpha_dot[i] = ad
        hop_index[i] = hop
        if not (isfinite(zf) and isfinite(vf) and isfinite(zb)
                and isfinite(vb) and isfinite(a) and isfinite(ad)):
            return i

        total = 0.0
        for k in range(n_tiles):
            phi = a + tile_angles[k]
            depth = segment_radius * cos(phi) + dome_radius - zf
            f = 0.0
            if depth > 0.0:
                rate = -(vf + segment_radius * sin(phi) * ad)
                f = k_depth * (depth if depth < yield_depth else yield_depth)
                if rate > 0.0:
                    f += c_vel * rate
            forces[i, k] = f
            total += f
        if i == n_steps:
            break
        if total > 0.0:
            touched = True

        spring = leg_stiffness * (leg_length - (zb - zf)) + leg_damping * (vf - vb)
        vb_new = vb + dt * (spring / body_mass * 1000.0 - gravity)
        if total == 0.0 and touched and vb > 0.0 and vb_new <= 0.0:
            if hop < n_targets - 1:
                hop += 1
            touched = False
        vb = vb_new
        vf = vf + dt * ((total - spring) / foot_mass * 1000.0 - gravity)
        zb = zb + dt * vb
        zf = zf + dt * vf
        ad = ad + dt * (w2 * (targets[hop] - a) - 2.0 * servo_omega * ad)
        a = a + dt * ad
    return -1
