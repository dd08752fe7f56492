"""Sagittal-plane geometry of the arced footpad.

The foot segment pivots about the ankle joint.  Four tiles sit on an arc of
radius ``segment_radius`` around that joint; each dome is modelled as a
sphere of radius ``dome_radius`` whose centre lies on the arc.  The angle
``alpha`` is measured from the downward vertical to the segment axis,
positive when the foot points forward (+y).  ``z`` points up, except in
the camera frame used by :class:`MarkerPair`, where it points down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError


def _default_angles():
    return tuple(np.radians(np.linspace(-20.0, 20.0, 4)).tolist())


@dataclass(frozen=True)
class ArrayLayout:
    segment_radius: float = 150.0
    dome_radius: float = 6.0  # 11 mm dome / 2 plus 0.5 mm PCB standoff
    tile_arc_angles: tuple = field(default_factory=_default_angles)
    arc_span: float = math.radians(40.0)

    def __post_init__(self):
        angles = tuple(float(a) for a in self.tile_arc_angles)
        object.__setattr__(self, "tile_arc_angles", angles)
        if not angles:
            raise GeometryError("layout needs at least one tile")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise GeometryError("tile arc angles must be strictly increasing")
        half = 0.5 * self.arc_span + 1e-12
        if any(abs(a) > half for a in angles):
            raise GeometryError("tile arc angles must lie within the arc span")
        if self.segment_radius <= 0 or self.dome_radius <= 0:
            raise GeometryError("radii must be positive")

    @property
    def n_tiles(self):
        return len(self.tile_arc_angles)

    @property
    def rolling_radius(self):
        """Distance from the joint to the outer dome surface."""
        return self.segment_radius + self.dome_radius

    @property
    def angles(self):
        return np.asarray(self.tile_arc_angles)


@dataclass(frozen=True)
class SegmentState:
    alpha: float
    joint_position: tuple  # (y, z) mm
    timestamp: float = 0.0

    def __post_init__(self):
        if abs(self.alpha) > math.pi / 2:
            raise GeometryError("|alpha| must not exceed pi/2")


@dataclass(frozen=True)
class MarkerPair:
    """Two markers on the leg axis in camera coordinates (z down).

    ``m1`` sits on the joint and ``m2`` further down the segment.
    """

    m1: tuple
    m2: tuple

    def __post_init__(self):
        if math.hypot(self.m2[0] - self.m1[0], self.m2[1] - self.m1[1]) == 0.0:
            raise GeometryError("markers coincide")


def contact_point(alpha, layout):
    """Contact point of the dome relative to the joint, per the rolling model.

    ``y = l sin(a) - r cos(a)``, ``z = -l cos(a) - r sin(a)``.
    """
    l, r = layout.segment_radius, layout.dome_radius
    a = np.asarray(alpha, dtype=float)
    y = l * np.sin(a) - r * np.cos(a)
    z = -l * np.cos(a) - r * np.sin(a)
    if y.ndim == 0:
        return float(y), float(z)
    return y, z


def rim_point(alpha, beta, layout):
    """Point of the rolling rim (radius ``l + r``) relative to the joint.

    ``beta`` is the body-fixed arc angle measured from the segment axis.
    Under pure rolling the rim touches the plate at ``beta = -alpha``,
    directly below the joint.
    """
    R = layout.rolling_radius
    a = np.asarray(alpha, dtype=float) + np.asarray(beta, dtype=float)
    y, z = R * np.sin(a), -R * np.cos(a)
    if y.ndim == 0:
        return float(y), float(z)
    return y, z


def segment_angle(markers):
    """Segment angle from the downward vertical, from camera-frame markers."""
    dy = markers.m2[0] - markers.m1[0]
    dz = markers.m2[1] - markers.m1[1]
    if dy == 0.0 and dz == 0.0:
        raise GeometryError("markers coincide")
    return math.atan2(dy, dz)


def segment_angles(m1, m2):
    """Vectorised :func:`segment_angle` over ``(n, 2)`` marker arrays."""
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    d = m2 - m1
    if np.any((d[:, 0] == 0.0) & (d[:, 1] == 0.0)):
        raise GeometryError("markers coincide")
    return np.arctan2(d[:, 0], d[:, 1])


def markers_for(alpha, joint_position, spacing=100.0):
    """Camera-frame marker pair for a segment at ``alpha``."""
    yj, zj = joint_position
    return MarkerPair((yj, -zj), (yj + spacing * math.sin(alpha), -zj + spacing * math.cos(alpha)))


def dome_centres(alpha, joint_position, layout):
    """World ``(y, z)`` of every dome centre, arrays of shape ``alpha.shape + (n,)``."""
    a = np.asarray(alpha, dtype=float)[..., None] + layout.angles
    yj = np.asarray(joint_position[0], dtype=float)[..., None]
    zj = np.asarray(joint_position[1], dtype=float)[..., None]
    l = layout.segment_radius
    return yj + l * np.sin(a), zj - l * np.cos(a)


def tile_deflections(alpha, joint_y, joint_z, ground_height, layout):
    """Vectorised dome interpenetration with the ground plane (mm)."""
    _, zc = dome_centres(alpha, (joint_y, joint_z), layout)
    return np.maximum(0.0, np.asarray(ground_height, dtype=float)[..., None]
                      - (zc - layout.dome_radius))


def tile_engagement(state, layout, ground_height):
    """Per-tile deflection ``max(0, ground - lowest dome point)`` in mm."""
    yj, zj = state.joint_position
    return tile_deflections(state.alpha, yj, zj, ground_height, layout)


def footprint_radius(deflection, dome_radius):
    """Radius of the spherical-cap contact disc for a given deflection."""
    d = np.clip(np.asarray(deflection, dtype=float), 0.0, dome_radius)
    out = np.sqrt(np.maximum(dome_radius ** 2 - (dome_radius - d) ** 2, 0.0))
    return float(out) if out.ndim == 0 else out
