"""Hot loop of the permutation monotonicity test.

Costs arrive integer-scaled (common denominator) so both paths are exact.
Both paths walk the same order: selections of support indices in
lexicographic order, then permutation tuples in lexicographic order with the
first varied coordinate most significant.

``NFLOW_OT_NUMBA=0`` in the environment forces the numpy path.  Object-dtype
values (magnitudes that could overflow int64) always take the numpy path.
"""

from __future__ import annotations

import os
from itertools import permutations, product

import numpy as np

_FLAG = os.environ.get("NFLOW_OT_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _FLAG not in ("0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = NUMBA_REQUESTED and HAVE_NUMBA

# keep headroom for sums of up to ell terms in int64
INT64_SAFE = 2**62


def perm_table(ell: int) -> np.ndarray:
    """All permutations of range(ell) in lexicographic order, shape (ell!, ell)."""
    return np.array(list(permutations(range(ell))), dtype=np.int64).reshape(-1, ell)


def _first_violation_py(loc, strides, vals, inf, ell, perms, nfree):
    s, n = loc.shape
    P = perms.shape[0]
    fixed = n - nfree
    sel = np.zeros(ell, np.int64)
    pidx = np.zeros(max(nfree, 1), np.int64)
    own = np.zeros(s, np.int64)
    for i in range(s):
        f = 0
        for k in range(n):
            f += loc[i, k] * strides[k]
        own[i] = f
    n_sel = s**ell
    n_ptup = P**nfree
    for si in range(n_sel):
        r = si
        for j in range(ell - 1, -1, -1):
            sel[j] = r % s
            r //= s
        lhs_inf = False
        lhs = 0
        for j in range(ell):
            f = own[sel[j]]
            if inf[f]:
                lhs_inf = True
            else:
                lhs += vals[f]
        for pi in range(n_ptup):
            r = pi
            for q in range(nfree - 1, -1, -1):
                pidx[q] = r % P
                r //= P
            rhs_inf = False
            rhs = 0
            for j in range(ell):
                f = 0
                for k in range(n):
                    if k < fixed:
                        src = j
                    else:
                        src = perms[pidx[k - fixed], j]
                    f += loc[sel[src], k] * strides[k]
                if inf[f]:
                    rhs_inf = True
                    break
                rhs += vals[f]
            if rhs_inf:
                continue
            if lhs_inf or rhs < lhs:
                return si, pi
    return -1, -1


if USE_NUMBA:
    _first_violation_jit = numba.njit(cache=True)(_first_violation_py)
else:
    _first_violation_jit = None


def first_violation_numba(loc, strides, vals, inf, ell, nfree):
    """Index pair (selection rank, permutation-tuple rank) of the first violation, or (-1, -1)."""
    fn = _first_violation_jit
    if fn is None:
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not available")
        fn = numba.njit(cache=True)(_first_violation_py)
    return fn(loc, strides, vals, inf, ell, perm_table(ell), nfree)


def first_violation_numpy(loc, strides, vals, inf, ell, nfree):
    """Vectorized over permutation tuples; loops over selections in Python."""
    s, n = loc.shape
    perms = perm_table(ell)
    fixed = n - nfree
    ptup = np.array(list(product(range(perms.shape[0]), repeat=nfree)), dtype=np.int64)
    ptup = ptup.reshape(-1, nfree)
    # source atom position for each (perm tuple, j, coordinate)
    src = np.empty((ptup.shape[0], ell, n), dtype=np.int64)
    for k in range(n):
        if k < fixed:
            src[:, :, k] = np.arange(ell)
        else:
            src[:, :, k] = perms[ptup[:, k - fixed]]
    own = loc @ strides
    zero = vals.dtype.type(0) if vals.dtype != object else 0
    for si, sel in enumerate(product(range(s), repeat=ell)):
        sel = np.asarray(sel, dtype=np.int64)
        lhs_inf = bool(inf[own[sel]].any())
        lhs = vals[own[sel]].sum() if not lhs_inf else zero
        rows = sel[src]  # (T, ell, n) atom indices
        flat = (loc[rows, np.arange(n)] * strides).sum(axis=2)  # (T, ell)
        rhs_inf = inf[flat].any(axis=1)
        rhs = np.where(inf[flat], zero, vals[flat]).sum(axis=1)
        if lhs_inf:
            bad = ~rhs_inf
        else:
            bad = (~rhs_inf) & (rhs < lhs)
        if bad.any():
            return si, int(np.argmax(bad))
    return -1, -1


def first_violation(loc, strides, vals, inf, ell, nfree, *, backend=None):
    """Dispatch to the configured backend (``"numba"``, ``"numpy"`` or None for default)."""
    if backend is None:
        backend = "numba" if (USE_NUMBA and vals.dtype != object) else "numpy"
    if backend == "numba":
        if vals.dtype == object:
            raise ValueError("numba backend needs int64 values")
        si, pi = first_violation_numba(loc, strides, vals, inf, ell, nfree)
        return int(si), int(pi)
    if backend == "numpy":
        return first_violation_numpy(loc, strides, vals, inf, ell, nfree)
    raise ValueError(f"unknown backend {backend!r}")
