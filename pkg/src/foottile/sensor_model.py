"""Physics of a single FootTile.

A normal force squeezes the air bubble inside the polyurethane dome.  The
bubble obeys the isothermal gas law, so the barometer below it reads
``p2 = p1 * V1 / V2``.  The reading is then disturbed by noise, clamped to
the barometer range and quantised by its ADC.

The force-to-volume law is not known analytically.  For the reference design
(11 mm dome, Vytaflex 60) it is defined by inverting the reference
calibration curve, which makes simulated readings agree with that curve by
construction.  Other designs scale the force axis by a contact stiffness
factor ``(E / E_ref) * (d / d_ref)**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .calibration import PUBLISHED_CURVE, CalibrationCurve, evaluate, invert
from .errors import DesignError, DomainError

#: nominal saturation force of the reference design (N)
REFERENCE_SATURATION_FORCE = 30.0
REFERENCE_MODULUS = 2.17   # Vytaflex 60, MPa
REFERENCE_DIAMETER = 11.0  # mm

#: reference calibration: published shape scaled so the span is 30 N
REFERENCE_CURVE = PUBLISHED_CURVE.with_scale(
    REFERENCE_SATURATION_FORCE / PUBLISHED_CURVE.span)

MATERIALS = {"vf40": 0.69, "vf60": 2.17}


@dataclass(frozen=True)
class SensorDesign:
    """Geometry and material of one tile.  Lengths in mm, pressures in kPa."""

    dome_diameter: float = 11.0
    bubble_radius: float = 3.0
    youngs_modulus: float = 2.17  # MPa
    baseline_pressure: float = 100.0
    sensor_min: float = 50.0
    sensor_max: float = 115.0
    adc_bits: int = 10
    poisson_ratio: float = 0.5
    name: str = "custom"

    def __post_init__(self):
        if self.dome_diameter <= 0 or self.bubble_radius <= 0:
            raise DesignError("dome diameter and bubble radius must be positive")
        if 2.0 * self.bubble_radius > self.dome_diameter + 2.0:
            raise DesignError(
                f"bubble of radius {self.bubble_radius} mm does not fit a "
                f"{self.dome_diameter} mm dome")
        if not self.sensor_min < self.baseline_pressure < self.sensor_max:
            raise DesignError("need sensor_min < baseline_pressure < sensor_max")
        if self.youngs_modulus <= 0:
            raise DesignError("youngs_modulus must be positive")
        if int(self.adc_bits) != self.adc_bits or self.adc_bits < 1:
            raise DesignError("adc_bits must be a positive integer")
        if not 0.0 <= self.poisson_ratio < 1.0:
            raise DesignError("poisson_ratio must lie in [0, 1)")

    @property
    def bubble_volume(self):
        return 4.0 / 3.0 * math.pi * self.bubble_radius ** 3

    @property
    def full_scale(self):
        return 2 ** int(self.adc_bits) - 1

    @property
    def span(self):
        """Pressure rise from rest to saturation (kPa)."""
        return self.sensor_max - self.baseline_pressure

    @classmethod
    def from_mapping(cls, values):
        """Build a design from a flat ``{field: value}`` mapping.

        A ``preset`` key selects a named design first; remaining keys
        override its fields.
        """
        values = dict(values)
        base = {}
        if "preset" in values:
            base = _asdict(preset(values.pop("preset")))
        known = {f.name: f.type for f in fields(cls)}
        for key, raw in values.items():
            if key not in known:
                raise DesignError(f"unknown design field {key!r}")
            if key == "name":
                base[key] = str(raw)
            elif key == "adc_bits":
                base[key] = int(raw)
            else:
                base[key] = float(raw)
        return cls(**base)


def _asdict(design):
    return {f.name: getattr(design, f.name) for f in fields(design)}


def _make_presets():
    out = {}
    for d in (10, 11, 12):
        for mat, e in MATERIALS.items():
            name = f"d{d}-{mat}"
            out[name] = SensorDesign(dome_diameter=float(d), youngs_modulus=e, name=name)
    return out


#: the six dome/material combinations of the design study
PRESETS = _make_presets()
REFERENCE_DESIGN = PRESETS["d11-vf60"]


def preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise DesignError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class DeflectionModel:
    """Force-to-compression law shared by every design."""

    reference_curve: CalibrationCurve = REFERENCE_CURVE
    reference_modulus: float = REFERENCE_MODULUS
    reference_diameter: float = REFERENCE_DIAMETER

    def stiffness_scale(self, design):
        return ((design.youngs_modulus / self.reference_modulus)
                * (design.dome_diameter / self.reference_diameter) ** 2)

    def reference_force(self, p_norm):
        """Reference-design force at normalised pressure, zero at rest."""
        return evaluate(self.reference_curve, p_norm) - evaluate(self.reference_curve, 0.0)


DEFAULT_MODEL = DeflectionModel()


@dataclass(frozen=True)
class PressureSample:
    tile_id: int
    timestamp: float
    pressure_counts: int
    pressure: float
    saturated: bool


@dataclass
class TileStream:
    """Column-oriented PressureSamples of a whole tile array, time ordered."""

    timestamp: np.ndarray
    tile_id: np.ndarray
    pressure_counts: np.ndarray
    pressure: np.ndarray
    saturated: np.ndarray

    def __post_init__(self):
        self.timestamp = np.asarray(self.timestamp, dtype=float).ravel()
        self.tile_id = np.asarray(self.tile_id, dtype=np.int64).ravel()
        self.pressure_counts = np.asarray(self.pressure_counts, dtype=np.int64).ravel()
        self.pressure = np.asarray(self.pressure, dtype=float).ravel()
        self.saturated = np.asarray(self.saturated, dtype=bool).ravel()
        n = self.timestamp.size
        if any(a.size != n for a in (self.tile_id, self.pressure_counts,
                                     self.pressure, self.saturated)):
            raise ValueError("tile stream columns differ in length")

    def __len__(self):
        return self.timestamp.size

    @classmethod
    def from_tiles(cls, times, pressure, counts, saturated):
        """Merge per-tile arrays (lists indexed by tile) into one stream."""
        ids = [np.full(len(t), k) for k, t in enumerate(times)]
        cols = [np.concatenate(c) if len(c) else np.zeros(0)
                for c in (times, ids, counts, pressure, saturated)]
        order = np.lexsort((cols[1], cols[0]))
        return cls(*(c[order] for c in cols))

    @property
    def n_tiles(self):
        return int(self.tile_id.max()) + 1 if len(self) else 0

    def samples(self):
        for row in zip(self.tile_id, self.timestamp, self.pressure_counts,
                       self.pressure, self.saturated):
            yield PressureSample(int(row[0]), float(row[1]), int(row[2]),
                                 float(row[3]), bool(row[4]))

    def hold(self, frame_times, n_tiles, fill=np.nan):
        """Latest reading of each tile at every frame time, ``(frames, tiles)``."""
        frame_times = np.asarray(frame_times, dtype=float)
        out = np.full((frame_times.size, n_tiles), fill)
        for k in range(n_tiles):
            sel = self.tile_id == k
            t, p = self.timestamp[sel], self.pressure[sel]
            if t.size == 0:
                continue
            idx = np.searchsorted(t, frame_times + 1e-12, side="right") - 1
            ok = idx >= 0
            out[ok, k] = p[idx[ok]]
        return out


def bubble_pressure(p1, V1, V2):
    """Isothermal compression: ``p1 * V1 / V2``."""
    V1 = np.asarray(V1, dtype=float)
    V2 = np.asarray(V2, dtype=float)
    if np.any(V1 <= 0) or np.any(V2 <= 0):
        raise DomainError("volumes must be positive")
    if np.any(V2 > V1 * (1.0 + 1e-12)):
        raise DomainError("compressed volume exceeds the initial volume")
    out = p1 * V1 / V2
    return float(out) if out.ndim == 0 else out


def saturation_force(design, model=DEFAULT_MODEL):
    """Smallest force at which the bubble reaches ``sensor_max``."""
    return model.stiffness_scale(design) * model.reference_force(1.0)


def normalized_response(force, design, model=DEFAULT_MODEL):
    """Noise-free normalised pressure for ``force``, clipped at 1."""
    force = np.asarray(force, dtype=float)
    if np.any(force < 0) or np.any(np.isnan(force)):
        raise DomainError("force must be non-negative")
    curve = model.reference_curve
    f_ref = np.minimum(force / model.stiffness_scale(design), model.reference_force(1.0))
    p = invert(curve, f_ref + evaluate(curve, 0.0))
    return np.where(force >= saturation_force(design, model), 1.0, p)


def compressed_volume(force, design, model=DEFAULT_MODEL):
    """Bubble volume (mm^3) under ``force``; constant once saturated."""
    p_norm = normalized_response(force, design, model)
    p2 = design.baseline_pressure + p_norm * design.span
    out = design.baseline_pressure * design.bubble_volume / p2
    return float(out) if out.ndim == 0 else out


def quantize(pressure, design):
    """ADC counts of ``pressure`` over the full barometer span (round half up)."""
    p = np.clip(np.asarray(pressure, dtype=float), design.sensor_min, design.sensor_max)
    x = (p - design.sensor_min) / (design.sensor_max - design.sensor_min) * design.full_scale
    out = np.floor(x + 0.5).astype(np.int64)
    return int(out) if out.ndim == 0 else out


def dequantize(counts, design):
    """Pressure (kPa) at the centre of an ADC code."""
    c = np.asarray(counts, dtype=float)
    out = design.sensor_min + c / design.full_scale * (design.sensor_max - design.sensor_min)
    return float(out) if out.ndim == 0 else out


def noise_draw(rng, shape, sigma, design, kind="gaussian"):
    """Pressure noise (kPa) with standard deviation ``sigma * span``.

    ``kind="student-t"`` draws heavy-tailed noise (3 degrees of freedom)
    rescaled to the same standard deviation.
    """
    std = sigma * design.span
    if std == 0.0:
        return np.zeros(shape)
    if kind == "gaussian":
        return rng.normal(0.0, std, shape)
    if kind == "student-t":
        return rng.standard_t(3, shape) * (std / math.sqrt(3.0))
    raise DomainError(f"unknown noise kind {kind!r}")


def sample_arrays(force, design, model=DEFAULT_MODEL, noise_sigma=0.0, rng=None,
                  noise="gaussian"):
    """Vectorised reading pipeline.

    Returns ``(pressure_kpa, counts, saturated)`` arrays shaped like
    ``force``.  The pressure is the clamped analog value; counts is its
    ADC code.
    """
    if noise_sigma < 0:
        raise DomainError("noise_sigma must be non-negative")
    force = np.asarray(force, dtype=float)
    p_norm = normalized_response(force, design, model)
    clean = design.baseline_pressure + p_norm * design.span
    if rng is None:
        rng = np.random.default_rng()
    raw = clean + noise_draw(rng, force.shape, noise_sigma, design, noise)
    saturated = raw >= design.sensor_max
    pressure = np.clip(raw, design.sensor_min, design.sensor_max)
    return pressure, quantize(pressure, design), saturated


def sample(force, design=REFERENCE_DESIGN, model=DEFAULT_MODEL, noise_sigma=0.0,
           rng_seed=None, tile_id=0, timestamp=0.0):
    """One reading of a tile loaded with ``force`` newtons."""
    rng = np.random.default_rng(rng_seed)
    p, c, sat = sample_arrays(np.array([force], dtype=float), design, model,
                              noise_sigma, rng)
    return PressureSample(tile_id, float(timestamp), int(c[0]), float(p[0]), bool(sat[0]))


def hertz_force(deflection, design):
    """Normal force (N) of the dome pressed ``deflection`` mm into a flat.

    Hertz contact of a sphere of radius ``dome_diameter / 2`` against a
    rigid plane.
    """
    d = np.maximum(np.asarray(deflection, dtype=float), 0.0)
    e_star = design.youngs_modulus / (1.0 - design.poisson_ratio ** 2)
    out = 4.0 / 3.0 * e_star * math.sqrt(design.dome_diameter / 2.0) * d ** 1.5
    return float(out) if out.ndim == 0 else out


def hertz_deflection(force, design):
    """Inverse of :func:`hertz_force`."""
    f = np.asarray(force, dtype=float)
    if np.any(f < 0):
        raise DomainError("force must be non-negative")
    e_star = design.youngs_modulus / (1.0 - design.poisson_ratio ** 2)
    k = 4.0 / 3.0 * e_star * math.sqrt(design.dome_diameter / 2.0)
    out = (f / k) ** (2.0 / 3.0)
    return float(out) if out.ndim == 0 else out
