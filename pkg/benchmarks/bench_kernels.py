#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure Python fallback.

Usage: python benchmarks/bench_kernels.py [--trials N]

Covers the two hot paths: the sphere-tracking loop that dominates the
Monte Carlo experiment, and the matrix-free clause application used by
state evolution.
"""

import argparse
import time

import numpy as np

from adiapath import effpot, instances, operators
from adiapath._kernels import _ref

try:
    from adiapath._kernels import _core
except ImportError:
    _core = None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_tracking(trials):
    rng = np.random.default_rng(1)
    pots = [
        effpot.EffectivePotential.from_matrix(
            operators.sample_matrix(rng, 3, "real-symmetric", 3.0)
        )
        for _ in range(trials)
    ]
    s_grid = np.linspace(0.0, 1.0, 1001)
    out_m = np.zeros((1001, 3))
    out_v = np.zeros(1001)
    start = np.array([1.0, 0.0, 0.0])

    def run(impl):
        def body():
            for pot in pots:
                impl.track_cubic_sphere(
                    pot.mono_begin, pot.mono_final, pot.mono_extra,
                    s_grid, start, 1e-10, 200, 0.2, out_m, out_v,
                )
        return body

    rows = []
    t_ref = _time(run(_ref), 1) / trials
    rows.append(("python", t_ref))
    if _core is not None:
        t_core = _time(run(_core), 3) / trials
        rows.append(("compiled", t_core))
    return rows


def bench_apply(n):
    rng = np.random.default_rng(2)
    inst = instances.build_symmetric_instance(n)
    path = operators.build_path(inst)
    group = path.groups[0]
    mats = np.ascontiguousarray(
        operators._combined_mats(path, 0.5)[0], dtype=complex
    )
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    psi = np.ascontiguousarray(psi)
    out = np.zeros(1 << n, dtype=complex)

    def run(impl):
        def body():
            out[:] = 0.0
            impl.apply_clause_ops(psi, n, group.positions, mats, out)
        return body

    rows = []
    t_ref = _time(run(_ref), 3)
    rows.append(("python", t_ref))
    if _core is not None:
        t_core = _time(run(_core), 5)
        rows.append(("compiled", t_core))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20,
                        help="tracked potentials for the tracking benchmark")
    args = parser.parse_args()

    if _core is None:
        print("note: compiled core not built, timing the fallback only\n")

    print(f"tracking (1001-step path, per potential, {args.trials} potentials):")
    rows = bench_tracking(args.trials)
    base = rows[0][1]
    for name, t in rows:
        print(f"  {name:9s} {t * 1e3:8.2f} ms   x{base / t:.1f}")

    for n in (12, 16, 18):
        print(f"\nclause application (symmetric instance, n={n}, "
              f"{len(instances.build_symmetric_instance(n).clauses)} clauses):")
        rows = bench_apply(n)
        base = rows[0][1]
        for name, t in rows:
            print(f"  {name:9s} {t * 1e3:8.2f} ms   x{base / t:.1f}")


if __name__ == "__main__":
    main()
