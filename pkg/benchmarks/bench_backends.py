"""Wall-clock comparison of the numba and numpy kernels on the FRS model.

    python3 benchmarks/bench_backends.py [--runs 20] [--repeat 3]

The first numba call includes JIT compilation (or a cache load); it is
timed separately and excluded from the steady-state figures.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sdsim import RngPolicy, RunConfig, build_frs_model, compile_model, simulate_batch


def timed(fn, repeat: int) -> tuple[float, object]:
    best, result = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t)
    return best, result


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=20, help="runs per batch")
    ap.add_argument("--repeat", type=int, default=3, help="best-of repetitions")
    args = ap.parse_args()

    model = compile_model(build_frs_model())
    batch = [RunConfig(RngPolicy(global_seed=s)) for s in range(1, args.runs + 1)]
    save = ["HCI", "Avg Quality"]

    t = time.perf_counter()
    simulate_batch(model, batch[:1], save=save, backend="numba")
    print(f"numba first call (compile or cache load): {time.perf_counter() - t:.3f} s")

    rows = []
    results = {}
    for backend in ("numba", "numpy"):
        one, _ = timed(lambda: simulate_batch(model, batch[:1], save=save, backend=backend), args.repeat)
        many, res = timed(lambda: simulate_batch(model, batch, save=save, backend=backend), args.repeat)
        results[backend] = res
        rows.append((backend, one, many))

    steps = model.control.n_steps
    print(f"FRS model, {steps} Euler steps per run, best of {args.repeat}")
    print(f"{'backend':<8} {'1 run (s)':>10} {f'{args.runs} runs (s)':>12} {'steps/s':>12}")
    for backend, one, many in rows:
        print(f"{backend:<8} {one:>10.4f} {many:>12.4f} {steps * args.runs / many:>12.3g}")
    same = all(np.array_equal(a["Avg Quality"], b["Avg Quality"])
               for a, b in zip(results["numba"], results["numpy"]))
    print(f"backends bit-identical: {same}")
    print(f"speedup numba/numpy ({args.runs} runs): {rows[1][2] / rows[0][2]:.1f}x")


if __name__ == "__main__":
    main()
