"""Command-line interface: ``foottile {calibrate,simulate,estimate,report}``.

Exit status is 0 when every thresholded metric passes, 1 when a threshold
fails and 2 on errors.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .calibration import aggregate_runs, fit_cubic
from .errors import FootTileError, UndefinedCopError
from .estimation import (DEFAULT_DEADBAND, align_indices, contact_episodes, cop,
                         grf_series, roll_cop)
from .report import Report, combine_reports, mean_ci
from .sensor_model import (DEFAULT_MODEL, REFERENCE_CURVE, SensorDesign, saturation_force)
from .simulation import (RollScenario, scenario_from_config, simulate_hop,
                         simulate_indentation, simulate_roll)

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
STANCE_FRACTION = 0.2
COP_THRESHOLD_MM = 4.0
GRF_THRESHOLD_N = 1.0


def _now():
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _write_report(out, report):
    out = Path(out)
    (out / "report.json").write_text(report.to_json())
    (out / "report.txt").write_text(report.to_text())
    return ["report.json", "report.txt"]


# calibrate -----------------------------------------------------------------

CALIBRATE_KEYS = {"runs", "sigma", "depth_rate", "rate"}


def cmd_calibrate(design, runs=4, sigma=0.03, seed=0, out=".", depth_rate=0.2, rate=330.0,
                  config=None):
    """Simulate ``runs`` indentations, aggregate them and fit the cubic."""
    started = _now()
    seeds = np.random.SeedSequence(seed).spawn(runs)
    raw = [simulate_indentation(design, DEFAULT_MODEL, depth_rate, sigma,
                                np.random.default_rng(s), rate, run_id=f"run_{k + 1}")
           for k, s in enumerate(seeds)]
    usable = [r.unsaturated() for r in raw]
    agg = aggregate_runs(*usable)
    curve = fit_cubic(agg.as_run())

    expected = np.array(REFERENCE_CURVE.coefficients[:3]) * DEFAULT_MODEL.stiffness_scale(design)
    got = np.array([curve.c3, curve.c2, curve.c1])
    coef_err = float(np.max(np.abs(got / expected - 1.0)))

    report = Report("calibrate")
    report.add("r_squared", curve.r_squared, "", 0.999999 if sigma == 0 else 0.999, ">=")
    report.add("pooled_std", agg.pooled_std, "normalized",
               [max(sigma - 0.01, 0.0), sigma + 0.01], "in")
    report.add("coef_rel_error", coef_err, "", 1e-4 if sigma == 0 else None,
               "<=" if sigma == 0 else "")
    report.add("rest_offset_n", curve.c0, "N")
    report.add("saturation_force_n", saturation_force(design), "N")
    report.add("runs", runs)

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for r in raw:
        io.write_run(out / f"{r.run_id}.csv", r)
        files.append(f"{r.run_id}.csv")
    io.write_curve(out / "curve.txt", curve)
    io.write_aggregate(out / "aggregate.csv", agg)
    report.series += ["aggregate.csv"] + files
    files += ["curve.txt", "aggregate.csv"] + _write_report(out, report)
    cfg = dict(config or {})
    cfg.update(runs=runs, sigma=sigma, depth_rate=depth_rate, rate=rate)
    io.write_manifest(out, "calibrate", cfg, seed, files + ["manifest.json"], started, _now())
    return curve, report


# simulate ------------------------------------------------------------------

def cmd_simulate(config, out, seed=None):
    """Run the scenario in ``config`` and write its traces to ``out``.

    Everything is computed before the first file is written, so a failing
    scenario leaves no partial outputs.
    """
    started = _now()
    sc = scenario_from_config(config, seed)
    sc.bus.check()
    cfg = dict(config)
    cfg["seed"] = str(sc.seed)
    report = Report("simulate")
    out = Path(out)
    if isinstance(sc, RollScenario):
        tr = simulate_roll(sc)
        report.add("frames", tr.times.size)
        report.add("off_plate_frames", int(tr.off_plate.sum()))
        out.mkdir(parents=True, exist_ok=True)
        io.write_frames(out / "plate.csv", tr.frames())
        io.write_table(out / "plate_flags.csv", ["t", "off_plate"], [tr.times, tr.off_plate])
        io.write_markers(out / "markers.csv", tr.times, tr.markers)
        io.write_tiles(out / "tiles.csv", tr.tiles)
        files = ["plate.csv", "plate_flags.csv", "markers.csv", "tiles.csv"]
    else:
        tr = simulate_hop(sc)
        episodes = contact_episodes(tr.plate_t, tr.plate_fz)
        report.add("contact_episodes", len(episodes), "", sc.n_hops, "==")
        report.add("peak_force_n", float(tr.plate_fz.max(initial=0.0)), "N")
        out.mkdir(parents=True, exist_ok=True)
        io.write_table(out / "force_plate.csv", ["t", "fz"], [tr.plate_t, tr.plate_fz])
        frames = np.unique(tr.tiles.timestamp)
        truth = tr.tile_truth
        io.write_table(out / "tile_truth.csv",
                       ["t"] + [f"f{k + 1}" for k in range(truth.shape[1])] + ["total"],
                       [frames, *truth.T, truth.sum(axis=1)])
        io.write_tiles(out / "tiles.csv", tr.tiles)
        files = ["force_plate.csv", "tile_truth.csv", "tiles.csv"]
    (out / "scenario.cfg").write_text("".join(f"{k} = {v}\n" for k, v in cfg.items()))
    files += ["scenario.cfg"] + _write_report(out, report)
    io.write_manifest(out, "simulate", cfg, sc.seed, files + ["manifest.json"], started, _now())
    return report


# estimate ------------------------------------------------------------------

def stance_mask(total, fraction=STANCE_FRACTION):
    """Frames from the first to the last one carrying ``fraction`` of the peak load."""
    total = np.asarray(total, dtype=float)
    mask = np.zeros(total.size, dtype=bool)
    if total.size == 0 or not total.max() > 0:
        return mask
    idx = np.flatnonzero(total >= fraction * total.max())
    mask[idx[0]:idx[-1] + 1] = True
    return mask


def estimate_roll(trace_dir, sc):
    """COP series of a roll trace: ``(t, est, truth, error, in_stance)`` arrays."""
    trace_dir = Path(trace_dir)
    frames = io.read_frames(trace_dir / "plate.csv")
    tiles = io.read_tiles(trace_dir / "tiles.csv")
    mt, markers = io.read_markers(trace_dir / "markers.csv")
    t = np.array([f.timestamp for f in frames])
    period = 1.0 / sc.frame_rate
    align_indices(tiles.timestamp, t, period)
    align_indices(mt, t, period)
    if t.size == 0:
        empty = np.zeros(0)
        return empty, empty, empty, empty, np.zeros(0, dtype=bool)
    m_idx = align_indices(t, mt, period)
    design = sc.design
    p_norm = (tiles.hold(t, sc.layout.n_tiles, design.baseline_pressure)
              - design.baseline_pressure) / design.span
    est = roll_cop(p_norm, markers[m_idx, :2], markers[m_idx, 2:], sc.layout,
                   frames[0].origin[0], sc.cell_pitch, (3, sc.plate_shape[1]))
    total = np.array([f.values.sum() for f in frames])
    truth = np.full(t.size, np.nan)
    for i, f in enumerate(frames):
        try:
            truth[i] = cop(f).y_mm
        except UndefinedCopError:
            pass
    stance = stance_mask(total)
    ok = np.isfinite(est) & np.isfinite(truth)
    return t[ok], est[ok], truth[ok], (est - truth)[ok], stance[ok]


def _roll_metrics(report, err, stance):
    in_st = np.abs(err[stance])
    after = np.zeros(stance.size, dtype=bool)
    if stance.any():
        after[np.flatnonzero(stance)[-1] + 1:] = True
    report.add("max_cop_error_mm", in_st.max() if in_st.size else 0.0, "mm",
               COP_THRESHOLD_MM, "<")
    report.add("mean_cop_error_mm", in_st.mean() if in_st.size else 0.0, "mm")
    report.add("tail_cop_error_mm", np.abs(err[after]).mean() if after.any() else 0.0, "mm")
    report.add("stance_frames", int(stance.sum()))
    if not in_st.size:
        report.notes.append("no stance frames: centre of pressure undefined throughout")


def estimate_hop(trace_dir, sc, curve, deadband=DEFAULT_DEADBAND):
    """GRF estimate against the force plate: ``(grf_trace, truth_at_frames)``."""
    trace_dir = Path(trace_dir)
    tiles = io.read_tiles(trace_dir / "tiles.csv")
    _, plate = io.read_table(trace_dir / "force_plate.csv", ["t", "fz"])
    frames = np.unique(tiles.timestamp)
    design = sc.design
    p_norm = (tiles.hold(frames, sc.layout.n_tiles, design.baseline_pressure)
              - design.baseline_pressure) / design.span
    trace = grf_series(frames, p_norm, curve, deadband)
    if frames.size == 0:
        return trace, np.zeros(0), plate
    idx = align_indices(frames, plate[:, 0], 1.0 / sc.plate_rate)
    return trace, plate[idx, 1], plate


def cmd_estimate(trace_dir, out, curve=None):
    started = _now()
    trace_dir = Path(trace_dir)
    cfg = io.load_config(trace_dir / "scenario.cfg")
    sc = scenario_from_config(cfg)
    report = Report("estimate")
    out = Path(out)
    if isinstance(sc, RollScenario):
        t, est, truth, err, stance = estimate_roll(trace_dir, sc)
        _roll_metrics(report, err, stance)
        out.mkdir(parents=True, exist_ok=True)
        io.write_table(out / "cop_series.csv",
                       ["t", "cop_est_mm", "cop_truth_mm", "error_mm", "in_stance"],
                       [t, est, truth, err, stance])
        files = ["cop_series.csv"]
    else:
        curve = curve if curve is not None else REFERENCE_CURVE
        trace, truth, plate = estimate_hop(trace_dir, sc, curve)
        err = trace.total - truth
        report.add("mean_grf_error_n", np.abs(err).mean() if err.size else 0.0, "N",
                   GRF_THRESHOLD_N, "<")
        report.add("max_grf_error_n", np.abs(err).max(initial=0.0), "N")
        report.add("contact_episodes", len(contact_episodes(plate[:, 0], plate[:, 1])))
        out.mkdir(parents=True, exist_ok=True)
        io.write_grf(out / "grf.csv", trace)
        io.write_table(out / "grf_error.csv", ["t", "grf_est_n", "grf_truth_n", "error_n"],
                       [trace.timestamps, trace.total, truth, err])
        files = ["grf.csv", "grf_error.csv"]
    report.series += files
    files += _write_report(out, report)
    io.write_manifest(out, "estimate", {"trace_dir": str(trace_dir), **cfg}, sc.seed,
                      files + ["manifest.json"], started, _now())
    return report


# report --------------------------------------------------------------------

def average_cop_traces(series):
    """Average per-frame COP errors of several runs keyed on the frame time."""
    keyed = {}
    for t, err, stance in series:
        for ti, ei, si in zip(t, err, stance):
            e = keyed.setdefault(round(float(ti), 9), [[], []])
            e[0].append(ei)
            e[1].append(bool(si))
    times = np.array(sorted(keyed))
    mean, ci, count, stance = [], [], [], []
    for ti in times:
        errs, flags = keyed[ti]
        m, c = mean_ci(errs)
        mean.append(m)
        ci.append(c)
        count.append(len(errs))
        stance.append(all(flags))
    return times, np.array(mean), ci, np.array(count), np.array(stance, dtype=bool)


def cmd_report(run_dirs, out):
    started = _now()
    reports = []
    for d in run_dirs:
        path = Path(d) / "report.json"
        try:
            reports.append(Report.from_dict(json.loads(path.read_text())))
        except (OSError, ValueError, KeyError) as exc:
            raise FootTileError(f"cannot read {path}: {exc}") from None
    combined = combine_reports(reports)
    out = Path(out)
    files = []
    cop_files = [Path(d) / "cop_series.csv" for d in run_dirs]
    averaged = None
    if all(p.exists() for p in cop_files):
        series = []
        for p in cop_files:
            _, d = io.read_table(p, ["t", "cop_est_mm", "cop_truth_mm", "error_mm", "in_stance"])
            series.append((d[:, 0], d[:, 3], d[:, 4] != 0))
        averaged = average_cop_traces(series)
        t, mean, ci, count, stance = averaged
        err = np.abs(mean[stance])
        combined.add("max_mean_cop_error_mm", err.max() if err.size else 0.0, "mm",
                     COP_THRESHOLD_MM, "<")
        after = np.zeros(stance.size, dtype=bool)
        if stance.any():
            after[np.flatnonzero(stance)[-1] + 1:] = True
        combined.add("stance_mean_cop_error_mm", err.mean() if err.size else 0.0, "mm")
        combined.add("tail_mean_cop_error_mm",
                     np.abs(mean[after]).mean() if after.any() else 0.0, "mm")
    out.mkdir(parents=True, exist_ok=True)
    if averaged is not None:
        t, mean, ci, count, stance = averaged
        io.write_table(out / "cop_error_mean.csv",
                       ["t", "error_mean_mm", "ci95_mm", "n_runs", "in_stance"],
                       [t, mean, np.array(ci, dtype=object), count, stance])
        files.append("cop_error_mean.csv")
        combined.series.append("cop_error_mean.csv")
    files += _write_report(out, combined)
    io.write_manifest(out, "report", {"runs": ",".join(str(d) for d in run_dirs)}, None,
                      files + ["manifest.json"], started, _now())
    return combined


# entry point ---------------------------------------------------------------

def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="random seed")
    parser.add_argument("--config", default=default, help="key/value config file")
    parser.add_argument("--out", default=default,
                        help="output directory (default: $FOOTTILE_OUT or ./foottile-out)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="foottile",
        description="Simulate, calibrate and evaluate FootTile sensor arrays.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="simulate indentation runs and fit the cubic")
    _global_flags(cal, suppress=True)
    cal.add_argument("--preset", help="named sensor design, e.g. d11-vf60")
    cal.add_argument("--runs", type=int, help="number of indentation runs (default 4)")
    cal.add_argument("--sigma", type=float, help="normalized noise std (default 0.03)")
    cal.add_argument("--depth-rate", type=float, help="indentation speed in mm/s (default 0.2)")

    sim = sub.add_parser("simulate", help="run a roll or hop scenario")
    _global_flags(sim, suppress=True)
    sim.add_argument("scenario", nargs="?", help="scenario file (or use --config)")

    est = sub.add_parser("estimate", help="estimate COP or GRF from simulated traces")
    _global_flags(est, suppress=True)
    est.add_argument("trace_dir")
    est.add_argument("--curve", help="calibration curve file (default: reference curve)")

    rep = sub.add_parser("report", help="combine the reports of several runs")
    _global_flags(rep, suppress=True)
    rep.add_argument("run_dirs", nargs="+")
    return parser


def _run(args):
    out = args.out or io.default_out()
    seed = args.seed
    if args.command == "calibrate":
        cfg = io.load_config(args.config) if args.config else {}
        opts = {k: cfg.pop(k) for k in list(cfg) if k in CALIBRATE_KEYS}
        if args.preset:
            cfg = {"preset": args.preset, **{k: v for k, v in cfg.items() if k != "preset"}}
        design = SensorDesign.from_mapping(cfg or {"preset": "d11-vf60"})
        runs = args.runs if args.runs is not None else int(opts.get("runs", 4))
        sigma = args.sigma if args.sigma is not None else io.as_float(opts.get("sigma", 0.03))
        rate = args.depth_rate if args.depth_rate is not None else \
            io.as_float(opts.get("depth_rate", 0.2))
        _, report = cmd_calibrate(design, runs, sigma, 0 if seed is None else seed, out, rate,
                                  io.as_float(opts.get("rate", 330.0)), cfg)
    elif args.command == "simulate":
        path = args.scenario or args.config
        if not path:
            raise FootTileError("simulate needs a scenario file")
        report = cmd_simulate(io.load_config(path), out, seed)
    elif args.command == "estimate":
        curve = io.read_curve(args.curve) if args.curve else None
        report = cmd_estimate(args.trace_dir, out, curve)
    else:
        report = cmd_report(args.run_dirs, out)
    sys.stdout.write(report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def main(argv=None):
    args = build_parser().parse_args(argv)
    for name in ("seed", "config", "out"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        return _run(args)
    except (FootTileError, ValueError, OSError) as exc:
        print(f"foottile {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
