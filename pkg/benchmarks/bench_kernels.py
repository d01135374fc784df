"""Time the numba and numpy paths of the permutation monotonicity kernel.

Monotone inputs force a full enumeration, which is the worst case for both
paths.  Usage:  python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from nflow_ot import _kernels
from nflow_ot.cost import TableCost
from nflow_ot.counterexample import build_family
from nflow_ot.monotonicity import _scaled_tensor, enumeration_count


def cases():
    for M, ell in ((2, 3), (3, 3), (3, 4)):
        _, gamma, _, c = build_family(None, M)
        yield f"gamma_{M} l={ell}", gamma.support(), c, ell
    # zero cost on a diagonal-free grid: every competitor is finite and tied
    pts = [(1, 2, 3), (2, 3, 1), (3, 1, 2), (1, 3, 2), (2, 1, 3)]
    grid = TableCost(3, {}, 0)
    yield "grid5 l=4", pts, grid, 4


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'case':<16}{'pairs':>12}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, support, c, ell in cases():
        loc, strides, ints, inf, _ = _scaled_tensor(sorted(set(support)), c)
        vals = np.array(ints, dtype=np.int64)
        n = loc.shape[1]
        # pairs visited at this single l
        count = enumeration_count(len(set(support)), n, ell) - enumeration_count(len(set(support)), n, ell - 1)
        run_nb = lambda: _kernels.first_violation(loc, strides, vals, inf, ell, n - 1, backend="numba")
        run_np = lambda: _kernels.first_violation(loc, strides, vals, inf, ell, n - 1, backend="numpy")
        run_nb()  # compile outside the timing
        t_nb, r_nb = best_of(run_nb, args.repeat)
        t_np, r_np = best_of(run_np, args.repeat)
        assert r_nb == r_np, (name, r_nb, r_np)
        print(f"{name:<16}{count:>12}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
