"""Sampling schedule of the tile array on a shared I2C bus.

Each barometer needs ``conversion_time`` per reading, so no channel can be
read faster than ``1 / conversion_time`` (625 Hz for 1.6 ms).  Behind the
multiplexer the conversions may run in parallel (every tile sampled once
per frame) or strictly one after another in round-robin order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ScheduleError


@dataclass(frozen=True)
class BusSchedule:
    conversion_time: float = 1.6e-3
    aggregate_rate: float = 330.0
    parallel: bool = True
    order: tuple | None = None  # round-robin tile order, default 0..n-1

    def __post_init__(self):
        if not self.conversion_time > 0 or not self.aggregate_rate > 0:
            raise ScheduleError("conversion_time and aggregate_rate must be positive")

    @property
    def ceiling(self):
        return 1.0 / self.conversion_time

    def check(self):
        if self.aggregate_rate > self.ceiling * (1.0 + 1e-9):
            raise ScheduleError(
                f"aggregate rate {self.aggregate_rate:g} Hz exceeds the "
                f"{self.ceiling:g} Hz conversion ceiling")


def frame_times(rate, duration):
    """``k / rate`` for every frame starting in ``[0, duration)``."""
    if duration < 0:
        raise ScheduleError("duration must be non-negative")
    n = int(math.ceil(duration * rate - 1e-9))
    return np.arange(max(n, 0)) / rate


def bus_timestamps(schedule, n_tiles, duration):
    """Per-tile sample times (list of arrays, one per tile)."""
    if n_tiles < 1:
        raise ScheduleError("need at least one tile")
    schedule.check()
    slots = frame_times(schedule.aggregate_rate, duration)
    if schedule.parallel:
        return [slots.copy() for _ in range(n_tiles)]
    order = schedule.order if schedule.order is not None else tuple(range(n_tiles))
    if sorted(order) != list(range(n_tiles)):
        raise ScheduleError("round-robin order must be a permutation of the tiles")
    owner = np.asarray(order)[np.arange(slots.size) % n_tiles]
    return [slots[owner == k] for k in range(n_tiles)]
