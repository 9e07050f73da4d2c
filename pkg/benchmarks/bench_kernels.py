"""Time the numba and numpy kernel backends on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size small|medium]

Each kernel runs once per backend before timing (this also triggers numba
compilation), the outputs are compared, and the best of ``--repeat`` runs
is reported.
"""

import argparse
import timeit

import numpy as np

from confdimlab._kernels import KERNEL_NAMES, get_backend
from confdimlab.approx import carpet_approximation, grid_approximation

SIZES = {
    "small": {"points": 200, "grid": 4, "carpet": 2, "curves": 100},
    "medium": {"points": 800, "grid": 6, "carpet": 4, "curves": 400},
}


def _cases(size):
    cfg = SIZES[size]
    rng = np.random.default_rng(0)
    X = rng.random((cfg["points"], 2))
    D = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(-1))
    u = rng.random(cfg["points"])
    rows = np.arange(0, cfg["points"], 3, dtype=np.int64)
    cols = np.arange(cfg["points"], dtype=np.int64)
    w_idx = np.sort(rng.choice(cfg["points"], cfg["points"] // 4, replace=False)).astype(np.int64)

    grid = grid_approximation(cfg["grid"])
    side = 2 ** cfg["grid"]
    src = np.zeros(grid.n_cells, dtype=np.bool_)
    tgt = np.zeros(grid.n_cells, dtype=np.bool_)
    src[np.arange(side) * side] = True
    tgt[np.arange(side) * side + side - 1] = True
    weights = rng.random(grid.n_cells)

    carpet = carpet_approximation(cfg["carpet"])
    lengths = rng.integers(3, 12, cfg["curves"])
    ptr = np.concatenate([[0], np.cumsum(lengths)]).astype(np.int64)
    idx = np.concatenate([np.sort(rng.choice(carpet.n_cells, n, replace=False)) for n in lengths]).astype(np.int64)
    rho = rng.random(carpet.n_cells)

    def sweep(mod):
        lam = np.zeros(cfg["curves"])
        s = np.zeros(carpet.n_cells)
        for _ in range(5):
            mod.dual_sweep(ptr, idx, lam, s, 2.5)
        return lam

    return {
        "triangle_violation": lambda mod: mod.triangle_violation(D, 1e-9),
        "pair_ratio_max": lambda mod: mod.pair_ratio_max(u, D, rows, cols, 0.5),
        "mcshane": lambda mod: mod.mcshane(u[w_idx], D, w_idx, 2.0),
        "vertex_dijkstra": lambda mod: mod.vertex_dijkstra(grid.indptr, grid.indices, weights, src, tgt),
        "dual_sweep": sweep,
        "curve_lengths": lambda mod: mod.curve_lengths(ptr, idx, rho),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64), rtol=1e-9, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", choices=sorted(SIZES), default="medium")
    args = ap.parse_args(argv)

    backends = {name: get_backend(name) for name in ("numba", "numpy")}
    cases = _cases(args.size)
    print(f"{'kernel':<20}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}  agree")
    for name in KERNEL_NAMES:
        fn = cases[name]
        outs = {b: fn(mod) for b, mod in backends.items()}
        times = {
            b: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) * 1e3
            for b, mod in backends.items()
        }
        agree = _same(outs["numba"], outs["numpy"])
        print(f"{name:<20}{times['numba']:>12.3f}{times['numpy']:>12.3f}"
              f"{times['numpy'] / times['numba']:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
