"""Edge generation rate vs. thread count, in memory (no file output).

    python scripts/scaling_benchmark.py --jobs 1 2 4 8

The default design has 141,557,760 edges: B = stars {3,4,5,9,16}, C = star 256.
"""

import argparse
import os
import time

from krongraph.design import GraphDesign
from krongraph.generator import CountingSink, plan, run_chunks


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--m-hat", type=int, nargs="+", default=[3, 4, 5, 9, 16, 256])
    parser.add_argument("--split", type=int, default=None)
    parser.add_argument("--workers", type=int, default=64, help="logical chunks")
    parser.add_argument("--jobs", type=int, nargs="+", default=[1, 2, 4])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    split = args.split or len(args.m_hat) - 1
    gp = plan(GraphDesign.stars(args.m_hat), split, args.workers, memory_budget=None)
    print(f"edges={gp.total_entries} nnz(B)={gp.b.nnz} nnz(C)={gp.c.nnz} "
          f"cores={len(os.sched_getaffinity(0))}")
    base = None
    for jobs in args.jobs:
        best = float("inf")
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            run_chunks(gp, lambda p: CountingSink(), jobs=jobs)
            best = min(best, time.perf_counter() - t0)
        rate = gp.total_entries / best
        base = base or rate
        print(f"jobs={jobs:<3} best={best:.3f}s rate={rate:.3e} edges/s speedup={rate / base:.2f}x")


if __name__ == "__main__":
    main()
