"""Quasi-static indentation of a single tile up to saturation."""
from __future__ import annotations

import numpy as np

from ..calibration import IndentationRun, normalize
from ..sensor_model import (DEFAULT_MODEL, REFERENCE_DESIGN, hertz_deflection, hertz_force,
                            sample_arrays, saturation_force)


def simulate_indentation(design=REFERENCE_DESIGN, model=DEFAULT_MODEL, depth_rate=0.2,
                         noise_sigma=0.0, seed=None, rate=330.0, noise="gaussian",
                         run_id="run"):
    """Drive the dome down at ``depth_rate`` mm/s and sample at ``rate`` Hz.

    The force comes from Hertz contact of the dome on the indenter.  The
    run stops at (and includes) the first saturated reading.
    """
    if not depth_rate > 0:
        raise ValueError("depth_rate must be positive")
    rng = np.random.default_rng(seed)
    t_sat = hertz_deflection(saturation_force(design, model), design) / depth_rate
    chunk = int(np.ceil(t_sat * rate)) + 2
    start, p_parts, f_parts, s_parts = 0, [], [], []
    while True:
        t = np.arange(start, start + chunk) / rate
        force = hertz_force(depth_rate * t, design)
        p, _, sat = sample_arrays(force, design, model, noise_sigma, rng, noise)
        hit = np.flatnonzero(sat)
        stop = hit[0] + 1 if hit.size else chunk
        p_parts.append(p[:stop])
        f_parts.append(force[:stop])
        s_parts.append(sat[:stop])
        if hit.size:
            break
        start += chunk
    return IndentationRun(normalize(np.concatenate(p_parts), design),
                          np.concatenate(f_parts), run_id=run_id,
                          saturated=np.concatenate(s_parts))
