"""Benchmark the compiled plant-stepping kernel against the pure fallback.

Runs identical blocks through both kernels, reports steps/second and the
speedup, and verifies the end states are bit-identical while at it.

Usage: python benchmarks/bench_step_kernel.py [n_steps]
"""

import struct
import sys
import time

from chilsim import engine

ARGS = dict(
    duty=0.25,
    dt=1e-5,
    relay=True,
    v_source=300.0,
    r_internal=0.25,
    inductance=10e-6,
    capacitance=470e-6,
    n_series=96.0,
    v_cutoff=3.0,
    ocv_span=1.2,
    r_pack=0.96,
    cap_denom=3600.0 * 2.7,
    mode=0,
    v_ceiling=400.0,
    i_cutoff=0.135,
)


def run(step_block, n_steps, block=1000):
    i_l, v, t, soc = 0.0, 390.0, 0.0, 0.5
    done = 0
    start = time.perf_counter()
    while done < n_steps:
        n = min(block, n_steps - done)
        i_l, v, t, soc, steps, _ = step_block(
            i_l, v, t, soc, ARGS["duty"], ARGS["dt"], n, ARGS["relay"],
            ARGS["v_source"], ARGS["r_internal"], ARGS["inductance"],
            ARGS["capacitance"], ARGS["n_series"], ARGS["v_cutoff"],
            ARGS["ocv_span"], ARGS["r_pack"], ARGS["cap_denom"],
            ARGS["mode"], ARGS["v_ceiling"], ARGS["i_cutoff"], done,
        )
        done += steps
    elapsed = time.perf_counter() - start
    return elapsed, struct.pack("<dddd", i_l, v, t, soc)


def main():
    n_steps = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    kernels = engine.available_kernels()
    print(f"kernels available: {', '.join(kernels)}; active: {engine.KERNEL_NAME}")
    results = {}
    for name, fn in kernels.items():
        run(fn, n_steps // 10)  # warmup
        elapsed, state = run(fn, n_steps)
        results[name] = (elapsed, state)
        print(f"{name:12s} {n_steps / elapsed / 1e6:8.2f} Msteps/s  ({elapsed:.3f} s)")
    if len(results) == 2:
        pure_t = results["pure-python"][0]
        comp_t = results["compiled"][0]
        print(f"speedup: {pure_t / comp_t:.1f}x")
        same = results["pure-python"][1] == results["compiled"][1]
        print(f"end states bit-identical: {same}")
        if not same:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
