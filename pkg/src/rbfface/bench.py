"""Time the compiled kernels against the numpy fallback.

Run with ``python -m rbfface.bench`` (``--quick`` for a smaller workload).
Each row reports the best of ``--repeat`` runs per backend and the speedup.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from ._backend import available


def _workloads(quick: bool):
    rng = np.random.default_rng(0)
    n, s = (1500, 50) if quick else (7000, 200)
    X = rng.normal(size=(n, 361))
    C = rng.normal(size=(s, 361))
    side = 60 if quick else 160
    img = rng.integers(0, 256, size=(side, side + 20)).astype(np.uint8)
    w = rng.normal(size=s)
    nb = 800 if quick else 4000
    bx = rng.integers(0, 400, nb).astype(np.int64)
    by = rng.integers(0, 400, nb).astype(np.int64)
    bs = rng.integers(19, 60, nb).astype(np.int64)
    return [
        (f"pairwise_sq_dist {n}x361 vs {s}", lambda k: k.pairwise_sq_dist(X, C)),
        (f"scan_level {side}x{side + 20}, {s} centers", lambda k: k.scan_level(img, 19, 1, C, w, 4.0)),
        (f"nms_keep {nb} boxes", lambda k: k.nms_keep(bx, by, bs, 0.3)),
    ]


def run(quick=False, repeat=3):
    """Return rows of (workload, {backend: best seconds})."""
    backends = available()
    rows = []
    for label, fn in _workloads(quick):
        times = {}
        for name, k in backends.items():
            times[name] = min(timeit.repeat(lambda: fn(k), number=1, repeat=repeat))
        rows.append((label, times))
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m rbfface.bench", description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small workload")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rows = run(args.quick, max(1, args.repeat))
    names = sorted(rows[0][1]) if rows else []
    head = f"{'workload':<40}" + "".join(f"{n + ' (s)':>14}" for n in names)
    if "cython" in names:
        head += f"{'speedup':>10}"
    print(head)
    for label, t in rows:
        line = f"{label:<40}" + "".join(f"{t[n]:>14.4f}" for n in names)
        if "cython" in t:
            line += f"{t['python'] / t['cython']:>9.1f}x"
        print(line)
    if "cython" not in names:
        print("compiled extension not built; only the numpy fallback was timed", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
