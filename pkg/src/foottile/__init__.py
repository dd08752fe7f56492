"""Simulation, calibration and estimation toolkit for FootTile sensor arrays."""
from .calibration import (AggregateCurve, CalibrationCurve, IndentationRun, aggregate_runs,
                          evaluate, fit_cubic, invert, normalize)
from .estimation import GridFrame, cop, embed_tiles, grf, tile_forces
from .kernels import BACKEND
from .kinematics import ArrayLayout, SegmentState, contact_point, segment_angle
from .sensor_model import (DEFAULT_MODEL, PRESETS, REFERENCE_CURVE, REFERENCE_DESIGN,
                           DeflectionModel, PressureSample, SensorDesign, bubble_pressure,
                           compressed_volume, preset, quantize, sample, saturation_force)

__version__ = "0.1.0"

__all__ = [
    "AggregateCurve", "CalibrationCurve", "IndentationRun", "aggregate_runs", "evaluate",
    "fit_cubic", "invert", "normalize", "GridFrame", "cop", "embed_tiles", "grf",
    "tile_forces", "BACKEND", "ArrayLayout", "SegmentState", "contact_point",
    "segment_angle", "DEFAULT_MODEL", "PRESETS", "REFERENCE_CURVE", "REFERENCE_DESIGN",
    "DeflectionModel", "PressureSample", "SensorDesign", "bubble_pressure",
    "compressed_volume", "preset", "quantize", "sample", "saturation_force", "__version__",
]
