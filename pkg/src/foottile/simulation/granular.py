"""Depth-and-rate resistance of a granular bed (no tension)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GranularParams:
    k_depth: float = 3.0      # N/mm
    c_vel: float = 0.01       # N s/mm
    yield_depth: float = math.inf  # depth beyond which resistance stops growing, mm

    def __post_init__(self):
        if min(self.k_depth, self.c_vel, self.yield_depth) < 0:
            raise ValueError("granular parameters must be non-negative")

    def doubled_damping(self):
        return GranularParams(self.k_depth, 2.0 * self.c_vel, self.yield_depth)


def granular_force(depth, depth_velocity, params):
    """Resistance in N: ``k * depth + c * max(0, rate)`` while submerged.

    ``depth_velocity`` is positive while penetrating.  Depth saturates at
    ``yield_depth``.
    """
    d = np.asarray(depth, dtype=float)
    v = np.asarray(depth_velocity, dtype=float)
    f = params.k_depth * np.minimum(d, params.yield_depth) + params.c_vel * np.maximum(v, 0.0)
    out = np.where(d > 0.0, f, 0.0)
    return float(out) if out.ndim == 0 else out
