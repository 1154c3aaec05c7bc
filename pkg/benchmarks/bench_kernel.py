"""Compiled vs pure-Python scan kernel.

    python3 benchmarks/bench_kernel.py [--repeat 3] [--quick]

Each case scans one full segment with the zero test enabled, the inner loop
of find_tau. Both backends must report the same hits and final state; the
script exits non-zero otherwise.
"""
from __future__ import annotations

import argparse
import statistics
import sys
import time

from mhsdiv import kernel
from mhsdiv.criterion import first_scale
from mhsdiv.mhs import ScaledStream, as_composition

CASES = [
    # (composition, p, tau)
    ((2,), 1009, 2),
    ((3,), 37, 3),
    ((2, 2), 13, 3),
    ((3, 3), 13, 3),
    ((3, 3, 3), 13, 4),
    ((4, 4), 19, 3),
    ((1, 1, 1, 1), 3, 9),
]
QUICK = CASES[:3]


def run_case(parts, p, tau, backend):
    c = as_composition(parts)
    m, t = c.min_part, tau - 1
    K = m * t + m
    st = ScaledStream(c, p, t, K, backend=backend)
    st.advance_to(max(c.depth, p ** t) - 1)
    start = time.perf_counter()
    hits = st.advance_to(p ** tau - 1, test_modulus=st.modulus)
    return time.perf_counter() - start, hits, list(st.psum), p ** tau - max(c.depth, p ** t)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args(argv)

    if kernel._ckernel is None:
        print("compiled kernel not built; only the Python backend is available", file=sys.stderr)
        return 1
    print(f"{'case':<22}{'steps':>10}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    ok = True
    for parts, p, tau in QUICK if args.quick else CASES:
        if tau <= first_scale(len(parts), p):
            continue
        timings = {}
        results = {}
        for backend in ("python", "cython"):
            runs = [run_case(parts, p, tau, backend) for _ in range(args.repeat)]
            timings[backend] = statistics.median(r[0] for r in runs)
            results[backend] = runs[0][1:3]
            steps = runs[0][3]
        if results["python"] != results["cython"]:
            ok = False
        label = f"{','.join(map(str, parts))} p={p} G_{tau}"
        print(f"{label:<22}{steps:>10}{timings['python']:>12.4f}{timings['cython']:>12.4f}"
              f"{timings['python'] / timings['cython']:>9.1f}x"
              + ("" if results["python"] == results["cython"] else "  MISMATCH"))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
