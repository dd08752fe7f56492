"""Hopping leg dropped into a granular bed.

The leg is a two-mass system: a light foot segment carrying the tiles and
the rest of the leg (hip and body) joined by a damped axial spring.  A hip
servo swings the segment angle to a new target at each flight apex, so
successive landings load different tiles.  The bed pushes on every
submerged dome with :func:`granular_force`; the force plate under the box
measures the total.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .. import kernels
from ..errors import IntegrationError
from ..kinematics import ArrayLayout
from ..sensor_model import DEFAULT_MODEL, REFERENCE_DESIGN, TileStream, sample_arrays
from .bus import BusSchedule, bus_timestamps, frame_times
from .granular import GranularParams

GRAVITY = 9810.0  # mm/s^2


def _default_targets(n_hops):
    if n_hops == 1:
        return (math.radians(20.0),)
    return tuple(np.radians(np.linspace(20.0, -20.0, n_hops)).tolist())


@dataclass(frozen=True)
class HopScenario:
    leg_mass: float = 0.909        # kg, total
    foot_mass: float = 0.05        # kg, part below the leg spring
    drop_height: float = 100.0     # lowest dome point above the bed surface, mm
    n_hops: int = 3
    granular: GranularParams = field(default_factory=GranularParams)
    hip_targets: tuple | None = None  # one segment angle per hop, rad
    servo_omega: float = 30.0      # rad/s, critically damped
    leg_stiffness: float = 0.3     # N/mm
    leg_damping: float = 0.002     # N s/mm
    leg_length: float = 200.0      # spring rest length, mm
    duration: float = 3.0
    dt: float = 1e-4
    gravity: float = GRAVITY
    noise_sigma: float = 0.03
    noise: str = "gaussian"
    seed: int = 0
    plate_rate: float = 330.0
    layout: ArrayLayout = field(default_factory=ArrayLayout)
    design: object = REFERENCE_DESIGN
    bus: BusSchedule = field(default_factory=BusSchedule)

    def __post_init__(self):
        if not self.leg_mass > 0 or not 0 < self.foot_mass < self.leg_mass:
            raise ValueError("need 0 < foot_mass < leg_mass")
        if self.drop_height < 0:
            raise ValueError("drop_height must be non-negative")
        if self.n_hops < 1:
            raise ValueError("n_hops must be at least 1")
        if not 0 < self.dt <= 1e-4:
            raise ValueError("integration step must lie in (0, 0.1 ms]")
        if self.duration < 0 or self.noise_sigma < 0:
            raise ValueError("duration and noise_sigma must be non-negative")
        if self.noise not in ("gaussian", "student-t"):
            raise ValueError(f"unknown noise kind {self.noise!r}")
        if self.hip_targets is not None and len(self.hip_targets) != self.n_hops:
            raise ValueError("hip_targets needs one angle per hop")

    @property
    def targets(self):
        t = self.hip_targets if self.hip_targets is not None else _default_targets(self.n_hops)
        return np.asarray(t, dtype=float)

    @property
    def body_mass(self):
        return self.leg_mass - self.foot_mass

    def mud(self):
        """The qualitative mud variant: doubled damping and heavy-tailed noise."""
        return replace(self, granular=self.granular.doubled_damping(), noise="student-t")


@dataclass
class HopTrace:
    t: np.ndarray             # integrator time grid, s
    z_foot: np.ndarray        # joint height above the bed, mm
    v_foot: np.ndarray
    z_body: np.ndarray
    v_body: np.ndarray
    alpha: np.ndarray
    hop_index: np.ndarray
    forces: np.ndarray        # (steps + 1, tiles) granular reaction per tile, N
    plate_t: np.ndarray
    plate_fz: np.ndarray      # force-plate truth at plate_t, N
    tile_truth: np.ndarray    # (frames, tiles) true tile forces at the tile frame times
    tiles: TileStream
    foot_mass: float
    body_mass: float
    gravity: float
    leg_stiffness: float
    leg_length: float
    dt: float

    @property
    def total_force(self):
        return self.forces.sum(axis=1)

    def momentum(self, i):
        """Vertical momentum in kg mm/s at step ``i``."""
        return self.foot_mass * self.v_foot[i] + self.body_mass * self.v_body[i]

    def impulse(self, i0, i1):
        """``integral (F - m g) dt`` over steps ``[i0, i1)`` in kg mm/s."""
        m = self.foot_mass + self.body_mass
        f = self.total_force[i0:i1]
        return float(np.sum(1000.0 * f - m * self.gravity) * self.dt)

    def energy(self):
        """Mechanical energy (mJ): kinetic, gravitational and leg-spring terms."""
        mf, mb, g = self.foot_mass, self.body_mass, self.gravity
        kinetic = 0.5 * (mf * self.v_foot ** 2 + mb * self.v_body ** 2) * 1e-3
        potential = (mf * self.z_foot + mb * self.z_body) * g * 1e-3
        stretch = self.leg_length - (self.z_body - self.z_foot)
        return kinetic + potential + 0.5 * self.leg_stiffness * stretch ** 2

    def liftoffs(self):
        """Step indices where the foot leaves the bed."""
        loaded = self.total_force > 0.0
        return np.flatnonzero(loaded[:-1] & ~loaded[1:]) + 1


def _initial_state(sc):
    layout = sc.layout
    a0 = float(sc.targets[0])
    reach = float(np.max(layout.segment_radius * np.cos(a0 + layout.angles)))
    z_foot0 = sc.drop_height + reach + layout.dome_radius
    # leg spring pre-compressed to carry the body weight
    sag = sc.body_mass * sc.gravity / 1000.0 / sc.leg_stiffness if sc.leg_stiffness > 0 else 0.0
    return a0, z_foot0, z_foot0 + sc.leg_length - sag


def simulate_hop(scenario):
    """Integrate a hop scenario and sample the tiles on the bus schedule."""
    sc = scenario
    layout, gp = sc.layout, sc.granular
    n_steps = int(round(sc.duration / sc.dt))
    n_tiles = layout.n_tiles
    a0, zf0, zb0 = _initial_state(sc)

    z_foot = np.empty(n_steps + 1)
    v_foot = np.empty(n_steps + 1)
    z_body = np.empty(n_steps + 1)
    v_body = np.empty(n_steps + 1)
    alpha = np.empty(n_steps + 1)
    alpha_dot = np.empty(n_steps + 1)
    forces = np.zeros((n_steps + 1, n_tiles))
    hop_index = np.zeros(n_steps + 1, dtype=np.int64)
    bad = kernels.hop_integrate(
        sc.dt, n_steps, sc.body_mass, sc.foot_mass, sc.gravity,
        sc.leg_stiffness, sc.leg_damping, sc.leg_length, zf0, zb0, a0,
        np.ascontiguousarray(sc.targets), sc.servo_omega,
        np.ascontiguousarray(layout.angles), layout.segment_radius, layout.dome_radius,
        gp.k_depth, gp.c_vel, gp.yield_depth,
        z_foot, v_foot, z_body, v_body, alpha, alpha_dot, forces, hop_index)
    if bad >= 0:
        raise IntegrationError(
            f"non-finite state at step {bad} (t={bad * sc.dt:.6g} s): "
            f"z_foot={z_foot[bad]!r}, v_foot={v_foot[bad]!r}, z_body={z_body[bad]!r}, "
            f"v_body={v_body[bad]!r}, alpha={alpha[bad]!r}")

    t = np.arange(n_steps + 1) * sc.dt
    total = forces.sum(axis=1)

    def at(times):
        return np.clip(np.rint(np.asarray(times) / sc.dt).astype(np.int64), 0, n_steps)

    plate_t = frame_times(sc.plate_rate, sc.duration)
    plate_fz = total[at(plate_t)]

    rng = np.random.default_rng(sc.seed)
    tile_times = bus_timestamps(sc.bus, n_tiles, sc.duration)
    p_parts, c_parts, s_parts = [], [], []
    for k in range(n_tiles):
        f_k = forces[at(tile_times[k]), k]
        p, c, s = sample_arrays(f_k, sc.design, DEFAULT_MODEL, sc.noise_sigma, rng, sc.noise)
        p_parts.append(p)
        c_parts.append(c)
        s_parts.append(s)
    tiles = TileStream.from_tiles(tile_times, p_parts, c_parts, s_parts)
    frames = frame_times(sc.bus.aggregate_rate, sc.duration)
    return HopTrace(t, z_foot, v_foot, z_body, v_body, alpha, hop_index, forces,
                    plate_t, plate_fz, forces[at(frames)], tiles,
                    sc.foot_mass, sc.body_mass, sc.gravity, sc.leg_stiffness,
                    sc.leg_length, sc.dt)
