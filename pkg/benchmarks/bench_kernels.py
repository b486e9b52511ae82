"""Compare the compiled and numpy kernel backends.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Each kernel is
timed on identical inputs for both backends and the results are checked to
agree before any timing is reported.
"""
import argparse
import os
import random
import subprocess
import sys
import time

import numpy as np

from raygen import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def closure_case(mod, rad, gens):
    size = int(np.prod(rad))
    elems = np.zeros(size, dtype=np.int64)
    mask = np.zeros(size, dtype=np.uint8)
    mask[0] = 1
    n = 1
    for g in gens:
        n = mod.closure_extend(elems, n, mask, g, rad)
    return n


def greedy_case(mod, rad, cands, target, order):
    return mod.greedy_generate(cands, target, order, rad)


def reduce_case(mod, forms):
    return [mod.reduce_form(a, b, c) for a, b, c in forms]


def add_case(mod, rad, pairs):
    return [mod.add_flat(a, b, rad) for a, b in pairs]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--max-m", type=int, default=600, help="modulus range for the end-to-end scan")
    args = ap.parse_args()

    py = kernels.backend_module("python")
    try:
        cy = kernels.backend_module("cython")
    except ImportError:
        raise SystemExit("compiled extension is not built; run `pip install -e . --no-build-isolation`")

    rng = random.Random(args.seed)
    rad = np.array([2, 6, 60, 420], dtype=np.int64)
    size = int(np.prod(rad))
    gens = [rng.randrange(size) for _ in range(4)]

    # target: the subgroup generated by two random elements, candidates random
    target = np.zeros(size, dtype=np.uint8)
    target[0] = 1
    order = 1
    elems = np.zeros(size, dtype=np.int64)
    for g in gens[:2]:
        order = py.closure_extend(elems, order, target, g, rad)
    cands = np.array([rng.randrange(size) for _ in range(5000)], dtype=np.int64)

    forms = []
    while len(forms) < 20000:
        a, b, c = rng.randrange(1, 10**6), rng.randrange(-(10**6), 10**6), rng.randrange(1, 10**6)
        if b * b < 4 * a * c:
            forms.append((a, b, c))
    pairs = [(rng.randrange(size), rng.randrange(size)) for _ in range(20000)]

    cases = [
        ("closure_extend", lambda m: closure_case(m, rad, gens)),
        ("greedy_generate", lambda m: greedy_case(m, rad, cands, target, order)),
        ("reduce_form x20000", lambda m: reduce_case(m, forms)),
        ("add_flat x20000", lambda m: add_case(m, rad, pairs)),
    ]
    print(f"group order {size}, repeat {args.repeat}")
    print(f"{'kernel':<22}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, fn in cases:
        a, b = fn(py), fn(cy)
        if isinstance(a, tuple):
            same = a[1] == b[1] and np.array_equal(a[0], b[0])
        else:
            same = a == b
        if not same:
            raise SystemExit(f"backends disagree on {name}")
        tp = best_of(lambda: fn(py), args.repeat)
        tc = best_of(lambda: fn(cy), args.repeat)
        print(f"{name:<22}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")

    # whole-pipeline timing: the backend is fixed at import, so use subprocesses
    script = "from raygen import zmstar; zmstar.scan(2, {m})".format(m=args.max_m)
    wall = {}
    for flag in ("1", "0"):
        env = dict(os.environ, RAYGEN_PURE_PYTHON=flag)
        t0 = time.perf_counter()
        subprocess.run([sys.executable, "-c", script], env=env, check=True)
        wall[flag] = time.perf_counter() - t0
    print(f"{'zm scan to ' + str(args.max_m):<22}{wall['1']:>12.2f}{wall['0']:>12.2f}"
          f"{wall['1'] / wall['0']:>9.1f}x")


if __name__ == "__main__":
    main()
