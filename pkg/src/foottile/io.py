"""CSV formats, key/value configs and run manifests.

Every number is written with 9 significant digits so that files round-trip
byte for byte through read and write.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from .calibration import CalibrationCurve, IndentationRun
from .errors import ConfigError
from .estimation import GridFrame, GrfTrace
from .sensor_model import TileStream

FMT = "{:.9g}"


def fmt(x):
    return FMT.format(float(x))


def write_table(path, header, columns):
    """Write equal-length columns as CSV with a single header line."""
    cols = [np.asarray(c) for c in columns]
    n = cols[0].size if cols else 0
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(_cell(c[i]) for c in cols) + "\n")


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return fmt(v)


def read_table(path, expect=None):
    """Read a CSV written by :func:`write_table`: ``(header, float array)``."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty file")
    header = lines[0].split(",")
    if expect is not None and header[:len(expect)] != list(expect):
        raise ConfigError(f"{path}: expected header {','.join(expect)}, got {lines[0]}")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]], dtype=float)
    return header, data.reshape(len(lines) - 1, len(header))


# calibration -------------------------------------------------------------

def write_run(path, run):
    write_table(path, ["pressure_norm", "force_n"], [run.pressure, run.force])


def read_run(path, run_id=None):
    _, d = read_table(path, ["pressure_norm", "force_n"])
    return IndentationRun(d[:, 0], d[:, 1], run_id=run_id or Path(path).stem)


def write_curve(path, curve):
    vals = [curve.c3, curve.c2, curve.c1, curve.c0, curve.r_squared, curve.scale]
    with open(path, "w") as fh:
        fh.write("c3,c2,c1,c0,r2,scale\n" + ",".join(fmt(v) for v in vals) + "\n")


def read_curve(path):
    _, d = read_table(path, ["c3", "c2", "c1", "c0", "r2", "scale"])
    if d.shape[0] != 1:
        raise ConfigError(f"{path}: expected exactly one curve record")
    c3, c2, c1, c0, r2, scale = d[0]
    return CalibrationCurve(c3, c2, c1, c0, r_squared=r2, scale=scale)


def write_aggregate(path, agg):
    write_table(path, ["force_n", "pressure_mean", "pressure_std", "ci95"],
                [agg.force, agg.mean, agg.std, agg.ci95])


# traces ------------------------------------------------------------------

def write_frames(path, frames):
    """GridFrame stream: file header, then per frame a metadata line and its rows."""
    with open(path, "w") as fh:
        fh.write("t,pitch,origin_y,origin_z\n")
        for k, f in enumerate(frames):
            if k:
                fh.write("\n")
            fh.write(",".join(fmt(v) for v in (f.timestamp, f.cell_pitch, *f.origin)) + "\n")
            for row in f.values:
                fh.write(",".join(fmt(v) for v in row) + "\n")


def read_frames(path):
    with open(path) as fh:
        text = fh.read()
    blocks = text.split("\n\n")
    head, _, first = blocks[0].partition("\n")
    if head.strip() != "t,pitch,origin_y,origin_z":
        raise ConfigError(f"{path}: not a grid-frame file")
    blocks[0] = first
    frames = []
    for block in blocks:
        lines = [ln for ln in block.strip().splitlines() if ln.strip()]
        if not lines:
            continue
        t, pitch, oy, oz = (float(x) for x in lines[0].split(","))
        vals = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
        frames.append(GridFrame(vals, pitch, (oy, oz), t))
    return frames


def write_grf(path, trace):
    n = trace.per_tile.shape[1]
    write_table(path, ["t"] + [f"f{k + 1}" for k in range(n)] + ["total"],
                [trace.timestamps, *trace.per_tile.T, trace.total])


def read_grf(path):
    header, d = read_table(path)
    return GrfTrace(d[:, 0], d[:, 1:-1], d[:, -1])


def write_markers(path, t, markers):
    m = np.asarray(markers, dtype=float).reshape(-1, 4)
    write_table(path, ["t", "y1", "z1", "y2", "z2"], [t, *m.T])


def read_markers(path):
    _, d = read_table(path, ["t", "y1", "z1", "y2", "z2"])
    return d[:, 0], d[:, 1:5]


def write_tiles(path, stream):
    write_table(path, ["t", "tile_id", "pressure_counts", "pressure_kpa", "saturated"],
                [stream.timestamp, stream.tile_id, stream.pressure_counts,
                 stream.pressure, stream.saturated])


def read_tiles(path):
    _, d = read_table(path, ["t", "tile_id", "pressure_counts", "pressure_kpa", "saturated"])
    return TileStream(d[:, 0], d[:, 1].astype(np.int64), d[:, 2].astype(np.int64),
                      d[:, 3], d[:, 4] != 0)


# configs and manifests -----------------------------------------------------

def parse_config(text, source="<config>"):
    """Parse ``key = value`` lines (``#`` comments) into an ordered dict."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None,
                                   delimiters=("=",))
    cp.optionxform = str
    try:
        cp.read_string("[config]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    values = dict(cp["config"])
    if not values:
        raise ConfigError(f"{source}: no settings found")
    return values


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, str(path))


def as_float(raw, key="value"):
    """Number from a config string; a ``deg`` suffix converts degrees to radians."""
    s = str(raw).strip()
    try:
        if s.endswith("deg"):
            return math.radians(float(s[:-3]))
        return float(s)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as a number") from None


def as_floats(raw, key="value"):
    return tuple(as_float(x, key) for x in str(raw).split(",") if x.strip())


def as_bool(raw, key="value"):
    s = str(raw).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: cannot parse {raw!r} as a boolean")


def config_hash(mapping):
    """sha256 of the canonical JSON form; independent of key order."""
    blob = json.dumps({str(k): str(v) for k, v in mapping.items()}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def write_manifest(out_dir, command, config, seed, outputs, started, finished):
    from . import __version__
    from .kernels import BACKEND
    manifest = {
        "command": command,
        "config_hash": config_hash(config),
        "config": {str(k): str(v) for k, v in config.items()},
        "seed": seed,
        "outputs": sorted(outputs),
        "versions": {"foottile": __version__, "numpy": np.__version__, "kernels": BACKEND},
        "started": started,
        "finished": finished,
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def default_out():
    return os.environ.get("FOOTTILE_OUT", "foottile-out")
