"""Centre-of-pressure and ground-reaction-force estimators.

Grid indices are 1-based: row ``i`` runs across the track (``x``), column
``j`` along it (``y``).  Cell ``(1, 1)`` is centred on ``GridFrame.origin``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibration import evaluate
from .errors import AlignmentError, EmbeddingError, UndefinedCopError
from .kinematics import dome_centres, segment_angles, tile_deflections

#: tile values below this normalised pressure are treated as unloaded
DEFAULT_DEADBAND = 0.06


@dataclass(frozen=True)
class GridFrame:
    values: np.ndarray
    cell_pitch: float = 7.62
    origin: tuple = (0.0, 0.0)  # (y, z) of cell (1, 1), mm
    timestamp: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or min(v.shape) < 1:
            raise ValueError("grid values must be a non-empty 2-D array")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite and non-negative")
        if not self.cell_pitch > 0:
            raise ValueError("cell_pitch must be positive")
        object.__setattr__(self, "values", v)

    @property
    def shape(self):
        return self.values.shape


@dataclass(frozen=True)
class CopEstimate:
    x_cop: float
    y_cop: float
    position_mm: tuple  # (y, z)
    total_pressure: float

    @property
    def y_mm(self):
        return self.position_mm[0]


@dataclass
class GrfTrace:
    timestamps: np.ndarray
    per_tile: np.ndarray
    total: np.ndarray

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=float)
        self.per_tile = np.asarray(self.per_tile, dtype=float).reshape(self.timestamps.size, -1)
        self.total = np.asarray(self.total, dtype=float)
        if self.total.shape != self.timestamps.shape:
            raise ValueError("total and timestamps differ in length")

    @classmethod
    def from_tiles(cls, timestamps, per_tile):
        per_tile = np.asarray(per_tile, dtype=float)
        return cls(timestamps, per_tile, per_tile.sum(axis=1))


def cop(grid):
    """First moment of the grid in index and millimetre coordinates."""
    v = grid.values
    total = float(v.sum())
    if not total > 0.0:
        raise UndefinedCopError("all-zero grid: centre of pressure is undefined")
    m, n = v.shape
    x = float(np.arange(1, m + 1) @ v.sum(axis=1)) / total
    y = float(np.arange(1, n + 1) @ v.sum(axis=0)) / total
    oy, oz = grid.origin
    pos = (oy + (y - 1.0) * grid.cell_pitch, oz + (x - 1.0) * grid.cell_pitch)
    return CopEstimate(x, y, pos, total)


def cop_error(estimate, truth):
    """Signed along-track COP error in mm (estimate minus truth)."""
    if estimate is None or truth is None:
        raise UndefinedCopError("centre of pressure undefined")
    return estimate.position_mm[0] - truth.position_mm[0]


def column_of(y, origin_y, pitch):
    """Continuous 1-based column index of along-track position ``y``."""
    return (np.asarray(y, dtype=float) - origin_y) / pitch + 1.0


def embed_tiles(tile_values, contact_y, origin_y=0.0, pitch=7.62, shape=(3, 50),
                mapping="linear", timestamp=0.0):
    """Place tile readings in the middle row of an ``m x n`` grid.

    ``contact_y`` holds each tile's along-track contact position in mm.
    With ``mapping="nearest"`` a tile fills the closest column; with
    ``"linear"`` its value is split between the two neighbouring columns so
    the grid's first moment lands exactly on the contact position.
    Negative readings (noise below rest) are clipped to zero.
    """
    vals = np.maximum(np.asarray(tile_values, dtype=float).ravel(), 0.0)
    cols = column_of(contact_y, origin_y, pitch).ravel()
    if vals.shape != cols.shape:
        raise EmbeddingError("one contact position per tile is required")
    m, n = shape
    grid = np.zeros(shape)
    row = (m - 1) // 2
    for v, c in zip(vals, cols):
        if v == 0.0:
            continue
        if not (1.0 - 1e-9 <= c <= n + 1e-9) or not math.isfinite(c):
            raise EmbeddingError(f"tile at column {c:.3f} lies outside a {n}-column grid")
        if mapping == "nearest":
            grid[row, int(math.floor(c + 0.5)) - 1] += v
        elif mapping == "linear":
            j = min(int(math.floor(c)), n)
            frac = c - j
            if frac <= 1e-12:
                grid[row, j - 1] += v
            else:
                grid[row, j - 1] += v * (1.0 - frac)
                grid[row, j] += v * frac
        else:
            raise EmbeddingError(f"unknown mapping {mapping!r}")
    return GridFrame(grid, pitch, (origin_y, 0.0), timestamp)


def tile_forces(p_norm, curve, deadband=DEFAULT_DEADBAND):
    """Calibrated force per tile with the rest offset removed.

    ``evaluate(curve, p) - evaluate(curve, 0)``, clamped at zero; readings
    under ``deadband`` count as unloaded.
    """
    p = np.asarray(p_norm, dtype=float)
    f = np.maximum(evaluate(curve, p) - evaluate(curve, 0.0), 0.0)
    return np.where(p < deadband, 0.0, f)


def grf(tile_samples, curve, design, deadband=DEFAULT_DEADBAND):
    """Per-tile forces and their total for one set of PressureSamples."""
    p = np.array([(s.pressure - design.baseline_pressure) / design.span for s in tile_samples])
    f = tile_forces(p, curve, deadband)
    return f, float(f.sum())


def grf_series(timestamps, p_norm, curve, deadband=DEFAULT_DEADBAND):
    return GrfTrace.from_tiles(timestamps, tile_forces(p_norm, curve, deadband))


def contact_episodes(times, force, on=1.0, off=0.5):
    """``(start, end)`` times of contact phases, detected with hysteresis."""
    times = np.asarray(times, dtype=float)
    force = np.asarray(force, dtype=float)
    episodes, start, inside = [], None, False
    for t, f in zip(times, force):
        if not inside and f > on:
            inside, start = True, t
        elif inside and f < off:
            inside = False
            episodes.append((start, t))
    if inside:
        episodes.append((start, times[-1]))
    return episodes


def align_indices(times, reference, period):
    """Index of the nearest ``reference`` sample for every entry of ``times``.

    Raises :class:`AlignmentError` when any pair is further apart than one
    frame ``period``.
    """
    times = np.asarray(times, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if times.size == 0:
        return np.zeros(0, dtype=np.int64)
    if reference.size == 0:
        raise AlignmentError("reference stream is empty")
    idx = np.clip(np.searchsorted(reference, times), 1, reference.size - 1) if reference.size > 1 \
        else np.zeros(times.size, dtype=np.int64)
    if reference.size > 1:
        left = reference[idx - 1]
        idx = np.where(np.abs(times - left) <= np.abs(reference[idx] - times), idx - 1, idx)
    gap = np.abs(reference[idx] - times)
    if np.any(gap > period * (1.0 + 1e-9)):
        worst = int(np.argmax(gap))
        raise AlignmentError(
            f"stream misaligned by {gap[worst]:.6g} s at t={times[worst]:.6g} s "
            f"(allowed {period:.6g} s)")
    return idx


def roll_cop(p_norm, m1, m2, layout, origin_y=0.0, pitch=7.62, shape=(3, 50),
             mapping="linear", ground=0.0):
    """Along-track COP (mm) from tile readings and camera-frame markers.

    The segment angle and joint position come from the markers.  Tiles whose
    dome geometrically reaches the ground are weighted by their normalised
    reading; frames without weight give NaN.
    """
    p_norm = np.asarray(p_norm, dtype=float)
    m1 = np.asarray(m1, dtype=float)
    alpha = segment_angles(m1, m2)
    yj, zj = m1[:, 0], -m1[:, 1]
    engaged = tile_deflections(alpha, yj, zj, np.full(alpha.shape, ground), layout) > 0.0
    contact_y, _ = dome_centres(alpha, (yj, zj), layout)
    out = np.full(alpha.size, np.nan)
    for k in range(alpha.size):
        w = np.where(engaged[k], np.maximum(p_norm[k], 0.0), 0.0)
        if not w.sum() > 0.0:
            continue
        try:
            frame = embed_tiles(w, contact_y[k], origin_y, pitch, shape, mapping)
        except EmbeddingError:
            continue
        out[k] = cop(frame).y_mm
    return out
