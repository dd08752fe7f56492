"""Pure-Python reference implementation of the hot kernels.

``_ckernels.pyx`` mirrors these functions operation for operation so both
backends produce the same floating-point results.
"""
import math

import numpy as np

BISECTION_STEPS = 64


def invert_cubic(c3, c2, c1, c0, scale, targets, steps=BISECTION_STEPS):
    """Solve ``scale*(c3 p^3 + c2 p^2 + c1 p + c0) = target`` on [0, 1].

    Plain bisection with a fixed step count; the caller guarantees the
    cubic is non-decreasing and every target is bracketed.
    """
    targets = np.asarray(targets, dtype=float)
    lo = np.zeros_like(targets)
    hi = np.ones_like(targets)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        f = scale * (((c3 * mid + c2) * mid + c1) * mid + c0)
        below = f < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def hop_integrate(dt, n_steps, body_mass, foot_mass, gravity,
                  leg_stiffness, leg_damping, leg_length,
                  z_foot0, z_body0, alpha0, targets, servo_omega,
                  tile_angles, segment_radius, dome_radius,
                  k_depth, c_vel, yield_depth,
                  z_foot, v_foot, z_body, v_body, alpha, alpha_dot,
                  forces, hop_index):
    """Semi-implicit Euler integration of the two-mass hopping leg.

    Units are mm, s, kg and N; accelerations are converted with the factor
    1000 (N/kg = m/s^2 = 1000 mm/s^2).  Output arrays are preallocated by the
    caller: state arrays have ``n_steps + 1`` entries and ``forces`` has shape
    ``(n_steps + 1, n_tiles)``.  Row ``i`` of ``forces`` holds the granular
    reaction evaluated at state ``i``, i.e. the force applied over step
    ``i -> i + 1``.

    Returns the index of the first non-finite state, or -1.
    """
    n_tiles = len(tile_angles)
    n_targets = len(targets)
    zf = z_foot0
    vf = 0.0
    zb = z_body0
    vb = 0.0
    a = alpha0
    ad = 0.0
    hop = 0
    touched = False
    w2 = servo_omega * servo_omega
    for i in range(n_steps + 1):
        z_foot[i] = zf
        v_foot[i] = vf
        z_body[i] = zb
        v_body[i] = vb
        alpha[i] = a
        alpha_dot[i] = ad
        hop_index[i] = hop
        if not (math.isfinite(zf) and math.isfinite(vf) and math.isfinite(zb)
                and math.isfinite(vb) and math.isfinite(a) and math.isfinite(ad)):
            return i

        total = 0.0
        for k in range(n_tiles):
            phi = a + tile_angles[k]
            depth = segment_radius * math.cos(phi) + dome_radius - zf
            f = 0.0
            if depth > 0.0:
                rate = -(vf + segment_radius * math.sin(phi) * ad)
                f = k_depth * min(depth, yield_depth)
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
        # next hip target at the body apex of each flight phase
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
