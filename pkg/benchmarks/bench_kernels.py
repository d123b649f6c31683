"""Compare the compiled and pure-Python kernel backends.

Times graph construction and betweenness centrality on a trained forest over
the bundled synthetic table. Run from the repository root:

    python3 benchmarks/bench_kernels.py --trees 16 --samples 800 --repeats 5
"""

from __future__ import annotations

import argparse
import os
import time

from dpg.build import build_dpg
from dpg.io import load_csv
from dpg.kernels import available_backends
from dpg.metrics import betweenness_centrality
from dpg.train import TrainConfig, fit_forest

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "dpg", "data", "synthetic.csv")


def best_of(repeats, fn):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trees", type=int, default=16)
    parser.add_argument("--samples", type=int, default=800)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--weighted-bc", action="store_true")
    args = parser.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend unavailable; run pip install -e . first")
        return 1

    d = load_csv(DATA)
    if args.samples < len(d):
        from dpg.model import Dataset

        d = Dataset(features=d.features, rows=d.rows[: args.samples],
                    labels=d.labels[: args.samples], label_names=d.label_names)
    m = fit_forest(d, TrainConfig(n_trees=args.trees, seed=0))
    g = build_dpg(m, d)
    print(f"forest: {args.trees} trees over {len(d)} samples; "
          f"graph: {len(g.nodes)} nodes, {len(g.edges)} edges")
    print(f"{'task':<12} {'python':>10} {'cython':>10} {'speedup':>8}")

    results = {}
    for name in ("python", "cython"):
        results[name] = {
            "build": best_of(args.repeats, lambda: build_dpg(m, d, backend=name)),
            "bc": best_of(
                args.repeats,
                lambda: betweenness_centrality(g, weighted=args.weighted_bc,
                                               backend=name),
            ),
        }
    for task in ("build", "bc"):
        py = results["python"][task]
        cy = results["cython"][task]
        print(f"{task:<12} {py * 1e3:>8.2f}ms {cy * 1e3:>8.2f}ms {py / cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
