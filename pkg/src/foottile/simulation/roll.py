"""Foot segment rolling over a pressure plate on a linear rail.

The ankle joint rides at a fixed height while a sled pulls it at constant
velocity; the segment angle follows the no-slip relation ``dy = R * dalpha``
with ``R = l + r``.  The joint is lowered by ``preload`` so that the domes
press into the plate.  Each tile's deflection gives its normal force, which
is (a) read through the sensor pipeline and (b) spread over the plate cells
under the tile's contact disc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..estimation import GridFrame
from ..kinematics import ArrayLayout, footprint_radius, tile_deflections, dome_centres
from ..sensor_model import (DEFAULT_MODEL, REFERENCE_DESIGN, TileStream, hertz_force,
                            sample_arrays)
from .bus import BusSchedule, bus_timestamps, frame_times

#: quadrature points used to spread a tile's force over its contact disc
DISC_POINTS = 256


def _disc_lattice(n=DISC_POINTS):
    # equal-area sunflower lattice on the unit disc
    i = np.arange(n)
    rho = np.sqrt((i + 0.5) / n)
    theta = i * math.pi * (3.0 - math.sqrt(5.0))
    return rho * np.cos(theta), rho * np.sin(theta)


_DISC_X, _DISC_Y = _disc_lattice()


@dataclass(frozen=True)
class RollScenario:
    layout: ArrayLayout = field(default_factory=ArrayLayout)
    pull_velocity: float = 150.0       # mm/s
    duration: float = 1.2              # s
    plate_shape: tuple = (4, 50)
    cell_pitch: float = 7.62           # mm
    noise_sigma: float = 0.03
    seed: int = 0
    preload: float = 1.9               # joint lowered below l + r, mm
    start_angle: float = math.radians(30.0)
    start_y: float = 100.0             # joint position along the plate, mm
    plate_origin: tuple = (0.0, None)  # (y, x) of cell (1, 1); x default centres the foot
    frame_rate: float = 330.0
    marker_spacing: float = 100.0
    design: object = REFERENCE_DESIGN
    bus: BusSchedule = field(default_factory=BusSchedule)

    def __post_init__(self):
        if not self.pull_velocity > 0:
            raise ValueError("pull_velocity must be positive")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if not self.cell_pitch > 0:
            raise ValueError("cell_pitch must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")

    @property
    def origin(self):
        oy, ox = self.plate_origin
        if ox is None:
            ox = -0.5 * (self.plate_shape[0] - 1) * self.cell_pitch
        return (oy, ox)

    @property
    def joint_height(self):
        return self.layout.rolling_radius - self.preload

    def state(self, t):
        """Segment angle and joint ``(y, z)`` at times ``t``."""
        t = np.asarray(t, dtype=float)
        R = self.layout.rolling_radius
        alpha = self.start_angle - self.pull_velocity * t / R
        yj = self.start_y + self.pull_velocity * t
        return alpha, yj, np.full(t.shape, self.joint_height)


@dataclass
class RollTrace:
    times: np.ndarray          # plate frame times, s
    plate: np.ndarray          # (frames, m, n) cell forces, N
    off_plate: np.ndarray      # frame flag: some contact fell outside the plate
    tile_force: np.ndarray     # true normal force per tile at frame times, N
    contact_y: np.ndarray      # along-track position of each dome's lowest point, mm
    alpha: np.ndarray
    markers: np.ndarray        # (frames, 4): y1, z1, y2, z2 in camera frame
    tiles: TileStream
    cell_pitch: float
    origin: tuple

    def frames(self):
        return [GridFrame(v, self.cell_pitch, self.origin, float(t))
                for t, v in zip(self.times, self.plate)]


def spread_force(force, centre_y, radius, origin, pitch, shape):
    """Distribute ``force`` over the plate cells under a contact disc.

    Returns ``(cells, lost)``: the per-cell increments and the force that fell
    outside the plate.
    """
    m, n = shape
    cells = np.zeros(shape)
    if force <= 0.0:
        return cells, 0.0
    ys = centre_y + radius * _DISC_Y
    xs = radius * _DISC_X
    col = np.floor((ys - origin[0]) / pitch + 0.5).astype(np.int64)
    row = np.floor((xs - origin[1]) / pitch + 0.5).astype(np.int64)
    inside = (col >= 0) & (col < n) & (row >= 0) & (row < m)
    share = force / _DISC_X.size
    np.add.at(cells, (row[inside], col[inside]), share)
    return cells, share * int((~inside).sum())


def simulate_roll(scenario):
    """Run a roll scenario; see :class:`RollTrace` for the outputs."""
    sc = scenario
    layout, design = sc.layout, sc.design
    n_t = layout.n_tiles
    t = frame_times(sc.frame_rate, sc.duration)
    alpha, yj, zj = sc.state(t)
    defl = tile_deflections(alpha, yj, zj, np.zeros(t.shape), layout)
    force = hertz_force(defl, design)
    cy, _ = dome_centres(alpha, (yj, zj), layout)

    m, n = sc.plate_shape
    plate = np.zeros((t.size, m, n))
    off = np.zeros(t.size, dtype=bool)
    for i in range(t.size):
        for k in range(n_t):
            if force[i, k] <= 0.0:
                continue
            cells, lost = spread_force(force[i, k], cy[i, k],
                                       footprint_radius(defl[i, k], layout.dome_radius),
                                       sc.origin, sc.cell_pitch, (m, n))
            plate[i] += cells
            off[i] |= lost > 0.0

    markers = np.column_stack([
        yj, -zj,
        yj + sc.marker_spacing * np.sin(alpha), -zj + sc.marker_spacing * np.cos(alpha)])

    rng = np.random.default_rng(sc.seed)
    tile_times = bus_timestamps(sc.bus, n_t, sc.duration)
    p_parts, c_parts, s_parts = [], [], []
    for k in range(n_t):
        tk = tile_times[k]
        a_k, y_k, z_k = sc.state(tk)
        d_k = tile_deflections(a_k, y_k, z_k, np.zeros(tk.shape), layout)[..., k]
        p, c, s = sample_arrays(hertz_force(d_k, design), design, DEFAULT_MODEL,
                                sc.noise_sigma, rng)
        p_parts.append(p)
        c_parts.append(c)
        s_parts.append(s)
    tiles = TileStream.from_tiles(tile_times, p_parts, c_parts, s_parts)
    return RollTrace(t, plate, off, force, cy, alpha, markers, tiles, sc.cell_pitch, sc.origin)
