"""Build roll and hop scenarios from flat key/value settings.

A scenario config names its experiment with ``kind = roll`` or
``kind = hop``.  Lengths are in mm, times in s, angles in rad unless the
value carries a ``deg`` suffix.  Unknown keys are rejected so that typos do
not silently fall back to defaults.
"""
from __future__ import annotations

from dataclasses import replace

from ..errors import ConfigError
from ..io import as_bool, as_float, as_floats
from ..kinematics import ArrayLayout
from ..sensor_model import SensorDesign
from .bus import BusSchedule
from .granular import GranularParams
from .hop import HopScenario
from .roll import RollScenario

LAYOUT_KEYS = {"segment_radius", "dome_radius", "tile_angles", "arc_span"}
BUS_KEYS = {"conversion_time", "bus_rate", "parallel"}
DESIGN_PREFIX = "design."

ROLL_FLOATS = {"pull_velocity", "duration", "cell_pitch", "noise_sigma", "preload",
               "start_angle", "start_y", "frame_rate", "marker_spacing"}
HOP_FLOATS = {"leg_mass", "foot_mass", "drop_height", "servo_omega", "leg_stiffness",
              "leg_damping", "leg_length", "duration", "dt", "gravity", "noise_sigma",
              "plate_rate"}
GRANULAR_KEYS = {"k_depth", "c_vel", "yield_depth"}


def _layout(cfg):
    kw = {}
    for key in ("segment_radius", "dome_radius", "arc_span"):
        if key in cfg:
            kw[key] = as_float(cfg[key], key)
    if "tile_angles" in cfg:
        kw["tile_arc_angles"] = as_floats(cfg["tile_angles"], "tile_angles")
    return ArrayLayout(**kw)


def _bus(cfg):
    kw = {}
    if "conversion_time" in cfg:
        kw["conversion_time"] = as_float(cfg["conversion_time"], "conversion_time")
    if "bus_rate" in cfg:
        kw["aggregate_rate"] = as_float(cfg["bus_rate"], "bus_rate")
    if "parallel" in cfg:
        kw["parallel"] = as_bool(cfg["parallel"], "parallel")
    return BusSchedule(**kw)


def _design(cfg):
    fields = {k[len(DESIGN_PREFIX):]: v for k, v in cfg.items() if k.startswith(DESIGN_PREFIX)}
    return SensorDesign.from_mapping(fields or {"preset": "d11-vf60"})


def scenario_from_config(cfg, seed=None):
    """Return a :class:`RollScenario` or :class:`HopScenario` for ``cfg``.

    ``seed`` overrides a ``seed`` key in the config.
    """
    cfg = dict(cfg)
    kind = cfg.pop("kind", "").strip().lower()
    try:
        if kind == "roll":
            sc = _roll(cfg)
        elif kind == "hop":
            sc = _hop(cfg)
        else:
            raise ConfigError(f"unknown scenario kind {kind!r}; use 'roll' or 'hop'")
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if seed is not None:
        sc = replace(sc, seed=int(seed))
    return sc


def _check_keys(cfg, allowed):
    extra = sorted(k for k in cfg if k not in allowed and not k.startswith(DESIGN_PREFIX))
    if extra:
        raise ConfigError(f"unknown scenario keys: {', '.join(extra)}")


def _roll(cfg):
    _check_keys(cfg, ROLL_FLOATS | LAYOUT_KEYS | BUS_KEYS | {"seed", "plate_rows", "plate_cols"})
    kw = {k: as_float(cfg[k], k) for k in ROLL_FLOATS if k in cfg}
    if "seed" in cfg:
        kw["seed"] = int(cfg["seed"])
    rows = int(cfg.get("plate_rows", 4))
    cols = int(cfg.get("plate_cols", 50))
    return RollScenario(layout=_layout(cfg), plate_shape=(rows, cols), design=_design(cfg),
                        bus=_bus(cfg), **kw)


def _hop(cfg):
    _check_keys(cfg, HOP_FLOATS | GRANULAR_KEYS | LAYOUT_KEYS | BUS_KEYS
                | {"seed", "n_hops", "hip_targets", "noise", "mud"})
    kw = {k: as_float(cfg[k], k) for k in HOP_FLOATS if k in cfg}
    if "seed" in cfg:
        kw["seed"] = int(cfg["seed"])
    if "n_hops" in cfg:
        kw["n_hops"] = int(cfg["n_hops"])
    if "hip_targets" in cfg:
        kw["hip_targets"] = as_floats(cfg["hip_targets"], "hip_targets")
    if "noise" in cfg:
        kw["noise"] = cfg["noise"].strip()
    gp = GranularParams(**{k: as_float(cfg[k], k) for k in GRANULAR_KEYS if k in cfg})
    sc = HopScenario(granular=gp, layout=_layout(cfg), design=_design(cfg), bus=_bus(cfg), **kw)
    if as_bool(cfg.get("mud", "false"), "mud"):
        sc = sc.mud()
    return sc
