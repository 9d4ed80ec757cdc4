"""Compare the compiled and pure-Python A* kernels on generator workloads.

Usage: python benchmarks/bench_astar.py [--per-kind N] [--size N]
"""

import argparse
import statistics
import time

from mazetrace.generators import ALL_KINDS, SEARCHFORMER, GenConfig, derive_seed, generate_instance
from mazetrace.search import HAVE_COMPILED_KERNEL, astar_trace


def build_grids(per_kind: int, size: int):
    grids = []
    for kind in ALL_KINDS:
        wall_levels = 4 if size >= 10 else 1
        for i in range(per_kind):
            cfg = GenConfig(kind=kind, width=size, height=size,
                            seed=derive_seed(1, i), wall_levels=wall_levels)
            inst = generate_instance(cfg)
            grids.append((kind, inst.grid, inst.difficulty))
    return grids


def time_backend(grids, backend: str, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _, grid, _ in grids:
            astar_trace(grid, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def time_kernel_only(grids, backend: str, repeats: int = 3) -> float:
    """Raw kernel time, without the trace-object construction both
    backends share in astar_trace."""
    from mazetrace import search

    calls = []
    for _, grid, _ in grids:
        calls.append((grid.cells.tobytes(), grid.width, grid.height,
                      grid.start, grid.goal))
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        if backend == "compiled":
            for cells, w, h, s, g in calls:
                search._astar_core.astar(cells, w, h, s[0], s[1], g[0], g[1])
        else:
            for cells, w, h, s, g in calls:
                search._astar_python(cells, w, h, s, g)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--per-kind", type=int, default=200)
    parser.add_argument("--size", type=int, default=30)
    args = parser.parse_args()

    grids = build_grids(args.per_kind, args.size)
    mean_difficulty = statistics.mean(d for _, _, d in grids)
    print(f"{len(grids)} grids at {args.size}x{args.size}, "
          f"mean difficulty {mean_difficulty:.0f}")

    py = time_backend(grids, "python")
    print(f"{'python':>10}: {py:8.3f}s  ({len(grids) / py:9.0f} solves/s)")
    if HAVE_COMPILED_KERNEL:
        ext = time_backend(grids, "compiled")
        print(f"{'compiled':>10}: {ext:8.3f}s  ({len(grids) / ext:9.0f} solves/s)")
        print(f"{'speedup':>10}: {py / ext:8.1f}x  (full astar_trace, "
              "trace objects included)")
        kpy = time_kernel_only(grids, "python")
        kext = time_kernel_only(grids, "compiled")
        print(f"{'kernels':>10}: {kpy:8.3f}s python vs {kext:.3f}s compiled "
              f"-> {kpy / kext:.1f}x")
    else:
        print("compiled kernel not built; only the fallback was timed")


if __name__ == "__main__":
    main()
