"""Compare the compiled and pure-Python dominance kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

Both kernels run on the same random inputs; their results are checked for
equality before timings are printed.
"""
import argparse
import random
import time

from kimpl.kernels import _pykernels

try:
    from kimpl.kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _matrix(rng, rows, cols):
    return [[rng.randint(-5, 5) for _ in range(cols)] for _ in range(rows)]


def _cases(seed):
    rng = random.Random(seed)
    nondom = [_matrix(rng, 12, 144) for _ in range(200)]
    grid_search = []
    for _ in range(20):
        base = _matrix(rng, 3, 3)
        cost = [(0, c) for c in range(3)]
        free = [(1, c) for c in range(3)]
        grid_search.append((base, cost, free, [0, 1, 2, 3, 11], [1, 1, 0]))
    return nondom, grid_search


def _time(fn, repeat):
    best = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    nondom, grid_search = _cases(args.seed)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    results = {}
    for name, mod in backends:
        t1, r1 = _time(lambda: [mod.nondominated(m) for m in nondom], args.repeat)
        t2, r2 = _time(lambda: [mod.feasible_cost_vectors(*c) for c in grid_search], args.repeat)
        results[name] = (t1, t2, [list(x) for x in r1], [list(map(tuple, x)) for x in r2])
    if len(results) == 2:
        assert results["python"][2:] == results["cython"][2:], "kernels disagree"
    print(f"{'backend':<8} {'nondominated':>14} {'grid search':>14}")
    for name, (t1, t2, _, _) in results.items():
        print(f"{name:<8} {t1 * 1e3:>12.2f}ms {t2 * 1e3:>12.2f}ms")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"{'speedup':<8} {py[0] / cy[0]:>13.1f}x {py[1] / cy[1]:>13.1f}x")
    else:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
