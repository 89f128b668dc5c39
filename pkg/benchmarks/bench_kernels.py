"""Time the DPLL and circuit kernels on each available backend.

    python3 benchmarks/bench_kernels.py [--repeat N] [--seed S]

The first numba call per kernel includes compilation; it is reported
separately as warm-up and excluded from the timings.
"""
import argparse
import random
import time

import numpy as np

from theoryfusion import kernels
from theoryfusion import propositional as prop


def random_cnf(rng, n, m, k=3):
    cnf = prop.CNF(n)
    for _ in range(m):
        cnf.add([2 * rng.randrange(n) + rng.randint(0, 1) for _ in range(k)])
    return cnf


def random_formula(rng, n, d):
    if d == 0:
        return prop.pvar(rng.randrange(n))
    k = rng.choice(["not", "and", "or"])
    if k == "not":
        return prop.pnot(random_formula(rng, n, d - 1))
    parts = [random_formula(rng, n, d - 1) for _ in range(2)]
    return prop.pand(parts) if k == "and" else prop.por(parts)


def workloads(seed):
    rng = random.Random(seed)
    # 3-SAT near the 4.26 ratio is where DPLL does real search
    cnfs = [random_cnf(rng, 60, 250) for _ in range(20)]
    cnfs = [prop.cnf_arrays(c) + (c.nvars,) for c in cnfs if not c.empty]
    circuits = [(prop.compile_circuit(random_formula(rng, 12, 8)), 12) for _ in range(20)]
    return cnfs, circuits


def run_dpll(cnfs):
    return sum(kernels.dpll(*c)[0] for c in cnfs)


def run_circuits(circuits):
    return sum(int(np.asarray(kernels.eval_circuit(*arr, n, 0, 1 << n)).sum()) for arr, n in circuits)


def timed(fn, arg, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(arg)
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cnfs, circuits = workloads(args.seed)
    prev = kernels.get_backend()
    rows = []
    try:
        for backend in kernels.available_backends():
            kernels.set_backend(backend)
            t = time.perf_counter()
            run_dpll(cnfs[:1])
            run_circuits(circuits[:1])
            warm = time.perf_counter() - t
            d, sat = timed(run_dpll, cnfs, args.repeat)
            c, ones = timed(run_circuits, circuits, args.repeat)
            rows.append((backend, warm, d, c, sat, ones))
    finally:
        kernels.set_backend(prev)
    print(f"{len(cnfs)} CNFs (60 vars, 250 clauses), {len(circuits)} circuits (12 vars, 4096 rows)")
    print(f"{'backend':8} {'warm-up':>9} {'dpll':>9} {'circuit':>9}  sat  ones")
    for backend, warm, d, c, sat, ones in rows:
        print(f"{backend:8} {warm:9.3f} {d:9.4f} {c:9.4f}  {sat:3d}  {ones}")
    results = {(sat, ones) for *_, sat, ones in rows}
    if len(results) > 1:
        raise SystemExit("backends disagree")


if __name__ == "__main__":
    main()
