"""Scenario engine for the indentation, rolling and hopping experiments."""
from .bus import BusSchedule, bus_timestamps, frame_times
from .granular import GranularParams, granular_force
from .hop import HopScenario, HopTrace, simulate_hop
from .indentation import simulate_indentation
from .roll import RollScenario, RollTrace, simulate_roll, spread_force
from .scenario import scenario_from_config

__all__ = [
    "BusSchedule", "bus_timestamps", "frame_times",
    "GranularParams", "granular_force",
    "HopScenario", "HopTrace", "simulate_hop",
    "simulate_indentation",
    "RollScenario", "RollTrace", "simulate_roll", "spread_force",
    "scenario_from_config",
]
