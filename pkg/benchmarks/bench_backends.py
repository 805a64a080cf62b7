"""Compare the compiled kernel against the pure-Python fallback.

Runs the full 17-cell matrix repeatedly on each backend and reports wall
times plus a single-cell hot-loop timing. The two backends produce
bit-identical traces (asserted here), so the numbers are like for like.

    python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from phylosim import run_matrix
from phylosim.backend import HAVE_COMPILED, available_backends
from phylosim.dynamics import run
from phylosim.model import ArchConfig, build_network
from phylosim.tasks import builtin_task


def time_matrix(backend: str, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        report = run_matrix(seeds=[7], backend=backend)
        best = min(best, time.perf_counter() - t0)
        assert report.all_match(), backend
    return best


def time_single(backend: str, repeat: int) -> float:
    arch = ArchConfig.from_kind("rm")
    net = build_network(builtin_task("mo", arch), arch)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        run(net, seed=7, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends available: {backends}")
    if HAVE_COMPILED:
        arch = ArchConfig.from_kind("rm")
        net = build_network(builtin_task("mo", arch), arch)
        py = run(net, seed=7, backend="python")
        cy = run(net, seed=7, backend="compiled")
        identical = (
            np.array_equal(py.sem, cy.sem)
            and np.array_equal(py.drv, cy.drv)
            and np.array_equal(py.rec, cy.rec)
        )
        print(f"trace equivalence (bitwise): {identical}")

    results = {}
    for backend in backends:
        m = time_matrix(backend, args.repeat)
        s = time_single(backend, args.repeat)
        results[backend] = (m, s)
        print(f"{backend:>9}: matrix {m * 1e3:8.1f} ms   540-iteration run {s * 1e3:7.2f} ms")
    if len(results) == 2:
        speed_m = results["python"][0] / results["compiled"][0]
        speed_s = results["python"][1] / results["compiled"][1]
        print(f"{'speedup':>9}: matrix {speed_m:8.1f} x    540-iteration run {speed_s:7.1f} x")


if __name__ == "__main__":
    main()
