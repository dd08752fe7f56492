"""Cubic force/pressure calibration of a FootTile.

Pressures are normalised to the saturation span: 0 at the resting bubble
pressure, 1 when the barometer saturates.  A :class:`CalibrationCurve` maps
that normalised reading to force in newtons::

    force = scale * (c3 p^3 + c2 p^2 + c1 p + c0)

Curves fitted by :func:`fit_cubic` carry ``scale = 1`` and coefficients in
newtons.  :data:`PUBLISHED_CURVE` is the published reference fit whose
coefficients describe the *shape* of the response only; its force scale is
supplied separately (see :mod:`foottile.sensor_model`).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AggregationError, FitError, RangeError

CONVENTION = "normalized-to-saturation"

#: derivative tolerance for the monotonicity check on [0, 1]
MONOTONE_TOL = 1e-9
MONOTONE_SCAN = 1001
CI_Z = 1.96
GRID_POINTS = 101


@dataclass(frozen=True)
class CalibrationCurve:
    c3: float
    c2: float
    c1: float
    c0: float
    r_squared: float = 1.0
    scale: float = 1.0
    pressure_convention: str = CONVENTION

    def __post_init__(self):
        if not 0.0 <= self.r_squared <= 1.0:
            raise FitError(f"r_squared must lie in [0, 1], got {self.r_squared}")
        if self.pressure_convention != CONVENTION:
            raise FitError(f"unsupported pressure convention {self.pressure_convention!r}")

    @property
    def coefficients(self):
        """``(c3, c2, c1, c0)`` with the scale folded in."""
        s = self.scale
        return (s * self.c3, s * self.c2, s * self.c1, s * self.c0)

    @property
    def rest_force(self):
        """Force reported at zero normalised pressure."""
        return self.scale * self.c0

    @property
    def span(self):
        """``evaluate(1) - evaluate(0)``."""
        return evaluate(self, 1.0) - evaluate(self, 0.0)

    def derivative(self, p):
        p = np.asarray(p, dtype=float)
        return self.scale * ((3.0 * self.c3 * p + 2.0 * self.c2) * p + self.c1)

    def with_scale(self, scale):
        return CalibrationCurve(self.c3, self.c2, self.c1, self.c0,
                                self.r_squared, float(scale))


#: F(p) = 0.13 p^3 + 0.02354 p^2 + 0.5702 p + 0.1309, R^2 = 99.99 %
PUBLISHED_CURVE = CalibrationCurve(0.13, 0.02354, 0.5702, 0.1309, r_squared=0.9999)


@dataclass
class IndentationRun:
    """One indentation ramp: normalised pressure against reference force."""

    pressure: np.ndarray
    force: np.ndarray
    run_id: str = "run"
    saturated: np.ndarray | None = None
    noise_margin: float = field(default=0.5, repr=False)

    def __post_init__(self):
        self.pressure = np.asarray(self.pressure, dtype=float).ravel()
        self.force = np.asarray(self.force, dtype=float).ravel()
        if self.pressure.shape != self.force.shape:
            raise ValueError("pressure and force must have the same length")
        if np.any(self.force < 0) or not np.all(np.isfinite(self.force)):
            raise ValueError(f"{self.run_id}: forces must be finite and non-negative")
        eps = self.noise_margin
        if np.any((self.pressure < -eps) | (self.pressure > 1.0 + eps)):
            raise ValueError(f"{self.run_id}: normalised pressure outside [-{eps}, 1+{eps}]")

    def __len__(self):
        return self.pressure.size

    def unsaturated(self):
        """The run without clamped samples, which carry no force information."""
        if self.saturated is None:
            return self
        keep = ~np.asarray(self.saturated, dtype=bool)
        return IndentationRun(self.pressure[keep], self.force[keep], self.run_id,
                              np.zeros(int(keep.sum()), dtype=bool), self.noise_margin)


@dataclass
class AggregateCurve:
    """Runs resampled onto a common force grid and averaged pointwise."""

    force: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    ci95: np.ndarray
    per_run: np.ndarray
    pooled_std: float

    @property
    def n_runs(self):
        return self.per_run.shape[0]

    def as_run(self, run_id="aggregate"):
        return IndentationRun(self.mean, self.force, run_id=run_id)


def normalize(raw, design):
    """Map a bubble pressure in kPa to the saturation-normalised scale."""
    span = design.sensor_max - design.baseline_pressure
    return (np.asarray(raw, dtype=float) - design.baseline_pressure) / span


def evaluate(curve, p):
    """Force in N at normalised pressure ``p`` (Horner form)."""
    p = np.asarray(p, dtype=float)
    out = curve.scale * (((curve.c3 * p + curve.c2) * p + curve.c1) * p + curve.c0)
    return float(out) if out.ndim == 0 else out


def check_monotone(curve, tol=MONOTONE_TOL, n=MONOTONE_SCAN):
    """Raise :class:`FitError` unless ``curve`` is non-decreasing on [0, 1]."""
    p = np.linspace(0.0, 1.0, n)
    d = curve.derivative(p)
    worst = int(np.argmin(d))
    if d[worst] < -tol:
        raise FitError(
            f"non-monotone calibration: dF/dp = {d[worst]:.6g} N at p = {p[worst]:.4f}; "
            "a force sensor curve must be invertible on [0, 1]")


def invert(curve, force, tol=1e-12):
    """Normalised pressure producing ``force``; bisection on [0, 1].

    ``force`` may be a scalar or an array.  Values outside
    ``[evaluate(0), evaluate(1)]`` raise :class:`RangeError`.
    """
    force = np.asarray(force, dtype=float)
    lo, hi = evaluate(curve, 0.0), evaluate(curve, 1.0)
    slack = tol * max(1.0, abs(lo), abs(hi))
    if np.any(force < lo - slack) or np.any(force > hi + slack) or np.any(np.isnan(force)):
        raise RangeError(f"force outside the invertible range [{lo:.6g}, {hi:.6g}] N")
    p = kernels.invert_cubic(curve.c3, curve.c2, curve.c1, curve.c0, curve.scale,
                             np.clip(force, lo, hi))
    p = np.asarray(p, dtype=float).reshape(force.shape)
    return float(p) if p.ndim == 0 else p


def fit_cubic(*runs, check=True):
    """Ordinary least-squares cubic ``force = f(pressure)`` over all runs.

    For constant data ``SS_tot`` is zero; r_squared is then reported as 1
    when the residual is zero as well.
    """
    if not runs:
        raise FitError("no indentation runs given")
    p = np.concatenate([r.pressure for r in runs])
    f = np.concatenate([r.force for r in runs])
    if np.unique(p).size < 4:
        raise FitError("rank-deficient design matrix: need at least 4 distinct pressures")
    A = np.vander(p, 4)
    coef, _, rank, _ = np.linalg.lstsq(A, f, rcond=None)
    if rank < 4:
        raise FitError("rank-deficient design matrix")
    resid = f - A @ coef
    ss_res = float(resid @ resid)
    centred = f - f.mean()
    ss_tot = float(centred @ centred)
    if ss_tot > 0.0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    r2 = min(1.0, max(0.0, r2))
    curve = CalibrationCurve(*(float(c) for c in coef), r_squared=r2)
    if check:
        check_monotone(curve)
    return curve


def _resample(force, pressure, grid, half_width):
    # local quadratic in a window around each grid node; sparse windows fall
    # back to linear interpolation
    order = np.argsort(force, kind="stable")
    force, pressure = force[order], pressure[order]
    out = np.interp(grid, force, pressure)
    lo = np.searchsorted(force, grid - half_width, side="left")
    hi = np.searchsorted(force, grid + half_width, side="right")
    for j, (a, b) in enumerate(zip(lo, hi)):
        if b - a < 3:
            continue
        x = force[a:b] - grid[j]
        if np.unique(x).size < 3:
            continue
        out[j] = np.polynomial.polynomial.polyfit(x, pressure[a:b], 2)[0]
    return out


def aggregate_runs(*runs, n_grid=GRID_POINTS, z=CI_Z):
    """Average repeated runs on a common force grid.

    Each run is resampled onto ``n_grid`` uniform force nodes spanning the
    force range shared by all runs.  The pointwise spread across runs gives
    the 95 % half-width ``z * std / sqrt(n)``; ``pooled_std`` is the standard
    deviation of all raw samples about the mean curve (the repeatability of
    the normalised output).
    """
    if len(runs) < 2:
        raise AggregationError(f"need at least 2 runs to aggregate, got {len(runs)}")
    lo = max(float(r.force.min()) for r in runs)
    hi = min(float(r.force.max()) for r in runs)
    if not hi > lo:
        raise AggregationError("runs have disjoint force support")
    grid = np.linspace(lo, hi, n_grid)
    half = (hi - lo) / (n_grid - 1)
    per_run = np.vstack([_resample(r.force, r.pressure, grid, half) for r in runs])
    mean = per_run.mean(axis=0)
    std = per_run.std(axis=0, ddof=1)
    ci = z * std / np.sqrt(len(runs))

    resid = []
    for r in runs:
        inside = (r.force >= lo) & (r.force <= hi)
        resid.append(r.pressure[inside] - np.interp(r.force[inside], grid, mean))
    resid = np.concatenate(resid)
    pooled = float(np.sqrt(resid @ resid / max(resid.size - 1, 1)))
    return AggregateCurve(grid, mean, std, ci, per_run, pooled)
