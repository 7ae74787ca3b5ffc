"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_backends.py [--vertices 2000] [--theta 200] [--repeat 3]

Prints one line per kernel with the best-of-``repeat`` wall time for each
backend and the speedup. Both backends get identical inputs and their
outputs are checked for equality before timing is reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rtlr import generate_sketches, partition_snapshots, predict_next_snapshot, candidate_edges
from rtlr._backend import pycore
from rtlr.synthetic import preferential_attachment_temporal

try:
    from rtlr import _ccore as ccore
except ImportError:  # pragma: no cover
    ccore = None


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vertices", type=int, default=2000)
    ap.add_argument("--snapshots", type=int, default=20)
    ap.add_argument("--theta", type=int, default=200)
    ap.add_argument("--probes", type=int, default=50)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if ccore is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation`")

    g = partition_snapshots(preferential_attachment_temporal(args.vertices, seed=args.seed), args.snapshots)
    gt = predict_next_snapshot(g)
    ce = list(candidate_edges(g, gt))
    ss = generate_sketches(gt, args.theta, args.seed)
    rng = np.random.default_rng(args.seed)
    pool = np.flatnonzero(gt.out_degree() >= 1)
    group = np.sort(rng.choice(pool, 6, replace=False)).astype(np.int32)
    probes = [ce[i] for i in rng.choice(len(ce), min(args.probes, len(ce)), replace=False)]
    bs, bd = (np.array([e[k] for e in probes[:5]], dtype=np.int32) for k in (0, 1))
    none = np.empty(0, dtype=np.int32)
    marks = np.zeros((ss.theta, ss.num_vertices), np.uint8)
    ccore.mark_sources(ss.indptr, ss.indices, marks, group, none, none)

    kernels = {
        "reach_mask": lambda k: k.reach_mask(gt.indptr, gt.indices, group),
        "sketch_reach_counts": lambda k: k.sketch_reach_counts(ss.indptr, ss.indices, group, bs, bd),
        f"marginal_counts x{len(probes)}": lambda k: tuple(
            k.marginal_counts(ss.indptr, ss.indices, marks, u, v, none, none, True) for u, v in probes),
        f"probe_gains x{len(probes)}": lambda k: k.probe_gains(
            ss.indptr, ss.indices, marks, [e[0] for e in probes], [e[1] for e in probes], none, none),
        f"ic_counts x{args.trials}": lambda k: k.ic_counts(gt.indptr, gt.indices, gt.prob, group,
                                                            none, none, args.seed, 0, args.trials),
    }
    print(f"|V|={gt.num_vertices} |E_t|={gt.num_edges} |CE|={len(ce)} theta={ss.theta}")
    print(f"{'kernel':<26}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, fn in kernels.items():
        tp, op = best_of(lambda: fn(pycore), args.repeat)
        tc, oc = best_of(lambda: fn(ccore), args.repeat)
        if not same(op, oc):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<26}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
