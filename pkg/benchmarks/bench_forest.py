#!/usr/bin/env python3
"""Time ensemble training on the compiled kernels vs the plain NumPy ones.

Both paths must produce bit-identical trees; the script verifies that
before reporting timings, so a speedup never hides a behavior change.
"""

from __future__ import annotations

import argparse
import os
import time

import numpy as np

from attrition.forest import TrainParams, predict_proba, train_forest
from attrition.forest.backend import DISABLE_ENV, get_backend, reset_backend


def synthetic_problem(rows: int, features: int, seed: int):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(rows, features))
    logits = X @ rng.normal(size=features) * 0.8 + rng.normal(size=rows) * 0.5
    y = (logits > 0).astype(np.float64)
    return X, y


def run_once(X, y, params: TrainParams, repeats: int) -> tuple[float, object]:
    best = float("inf")
    forest = None
    for _ in range(repeats):
        start = time.perf_counter()
        forest = train_forest(X, y, params)
        best = min(best, time.perf_counter() - start)
    return best, forest


def forests_equal(a, b) -> bool:
    if len(a.trees) != len(b.trees):
        return False
    for ta, tb in zip(a.trees, b.trees):
        for field in ("feature", "threshold", "left", "right", "prob", "count"):
            if not np.array_equal(getattr(ta, field), getattr(tb, field)):
                return False
    return True


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=1470)
    parser.add_argument("--features", type=int, default=59)
    parser.add_argument("--trees", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=3,
                        help="best-of-N timing per backend")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    X, y = synthetic_problem(args.rows, args.features, args.seed)
    params = TrainParams(n_trees=args.trees, seed=args.seed)

    os.environ.pop(DISABLE_ENV, None)
    reset_backend()
    backend_name = get_backend().__name__.rsplit(".", 1)[-1]
    print(f"active backend: {backend_name}")
    print(f"problem: {args.rows} rows x {args.features} features, "
          f"{args.trees} trees, best of {args.repeats}")

    # warm the JIT cache outside the timed region
    warm = TrainParams(n_trees=2, seed=args.seed)
    train_forest(X[:64], y[:64], warm)

    fast_time, fast_forest = run_once(X, y, params, args.repeats)
    print(f"compiled kernels: {fast_time:.3f}s")

    os.environ[DISABLE_ENV] = "1"
    reset_backend()
    plain_time, plain_forest = run_once(X, y, params, args.repeats)
    print(f"numpy kernels:    {plain_time:.3f}s")
    os.environ.pop(DISABLE_ENV, None)
    reset_backend()

    if not forests_equal(fast_forest, plain_forest):
        print("MISMATCH: backends trained different forests")
        return 1
    probs_a = predict_proba(fast_forest, X)
    probs_b = predict_proba(plain_forest, X)
    if not np.array_equal(probs_a, probs_b):
        print("MISMATCH: backends predict differently")
        return 1

    print(f"forests identical; speedup {plain_time / fast_time:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
