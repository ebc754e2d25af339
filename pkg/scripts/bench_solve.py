"""Benchmark the counting pipeline on the grid-switch family and random CNF.

Prints one JSON line per instance: which path ran (direct decomposition vs
backdoor branching), the count, and wall-clock time. The grid-switch family
has unbounded incidence treewidth but a single-variable strong backdoor, so
it separates the two paths cleanly as n grows.

Usage: python scripts/bench_solve.py [max_n]
"""

import json
import sys
import time

sys.path.insert(0, "src")

from twcount.counting import count_bruteforce, solve
from twcount.generators import gen_grid_formula_x, gen_random_cnf


def run(name, f, t, k, tw_threshold, check_brute=False):
    start = time.monotonic()
    res = solve(f, t, k, tw_threshold=tw_threshold, vertex_cap=64)
    elapsed = time.monotonic() - start
    row = {
        "instance": name,
        "outcome": res.outcome,
        "mode": res.mode,
        "count": str(res.count) if res.count is not None else None,
        "backdoor": list(res.backdoor) if res.backdoor else None,
        "seconds": round(elapsed, 3),
    }
    if check_brute and res.count is not None:
        row["brute_agrees"] = res.count == count_bruteforce(f)
    print(json.dumps(row, sort_keys=True))


def main() -> int:
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    for n in range(2, max_n + 1):
        f = gen_grid_formula_x(n)
        run(f"grid-switch n={n}", f, t=1, k=1, tw_threshold=1, check_brute=n <= 5)
    for seed in range(5):
        f = gen_random_cnf(10, 18, 3, seed)
        run(f"random n=10 m=18 seed={seed}", f, t=1, k=2, tw_threshold=1, check_brute=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
