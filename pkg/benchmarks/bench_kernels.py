"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Reports the best-of-N wall time per kernel and backend, and the speedup.
"""
import argparse
import time

import numpy as np

from foottile import kernels
from foottile.simulation import HopScenario
from foottile.simulation.hop import _initial_state


def _invert_job(mod):
    targets = np.linspace(0.1309, 0.85464, 20000)
    return lambda: mod.invert_cubic(0.13, 0.02354, 0.5702, 0.1309, 1.0, targets)


def _hop_job(mod, steps=30000):
    sc = HopScenario()
    lay, gp = sc.layout, sc.granular
    a0, zf0, zb0 = _initial_state(sc)
    bufs = [np.empty(steps + 1) for _ in range(6)]
    forces = np.zeros((steps + 1, lay.n_tiles))
    hop = np.zeros(steps + 1, dtype=np.int64)
    targets = np.ascontiguousarray(sc.targets)
    angles = np.ascontiguousarray(lay.angles)

    def job():
        mod.hop_integrate(sc.dt, steps, sc.body_mass, sc.foot_mass, sc.gravity,
                          sc.leg_stiffness, sc.leg_damping, sc.leg_length, zf0, zb0, a0,
                          targets, sc.servo_omega, angles, lay.segment_radius,
                          lay.dome_radius, gp.k_depth, gp.c_vel, gp.yield_depth,
                          *bufs, forces, hop)
    return job


def best_of(job, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        job()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = kernels.backends()
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':<22}{'backend':<10}{'seconds':>12}")
    for name, make in (("invert_cubic 20k", _invert_job), ("hop_integrate 3 s", _hop_job)):
        timing = {}
        for label, mod in backends.items():
            timing[label] = best_of(make(mod), args.repeat)
            print(f"{name:<22}{label:<10}{timing[label]:>12.5f}")
        if len(timing) == 2:
            print(f"{'':<22}{'speedup':<10}{timing['python'] / timing['cython']:>11.1f}x")


if __name__ == "__main__":
    main()
