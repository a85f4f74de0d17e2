"""Hot numeric kernels: interval merging and grid coverage.

Each kernel has a numba @njit implementation and a pure-numpy fallback.
Selection: the environment variable CFCRIT_DISABLE_NUMBA=1 forces the
numpy path; otherwise numba is used when importable.  Both paths produce
bit-identical results (only max/compare operations on the input floats).
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("CFCRIT_DISABLE_NUMBA", "") == "1"

try:  # pragma: no cover - exercised via the env flag in tests
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _merge_loop(lefts, rights):  # pragma: no cover - numba path
    n = lefts.shape[0]
    out_l = np.empty(n)
    out_r = np.empty(n)
    m = 0
    cur_l = lefts[0]
    cur_r = rights[0]
    for i in range(1, n):
        if lefts[i] <= cur_r:
            if rights[i] > cur_r:
                cur_r = rights[i]
        else:
            out_l[m] = cur_l
            out_r[m] = cur_r
            m += 1
            cur_l = lefts[i]
            cur_r = rights[i]
    out_l[m] = cur_l
    out_r[m] = cur_r
    m += 1
    return out_l[:m].copy(), out_r[:m].copy()


def _merge_numpy(lefts, rights):
    cummax = np.maximum.accumulate(rights)
    starts = np.empty(lefts.shape[0], dtype=np.bool_)
    starts[0] = True
    # half-open arcs: touching intervals ([a,b), [b,c)) merge
    starts[1:] = lefts[1:] > cummax[:-1]
    idx = np.flatnonzero(starts)
    ends = np.append(idx[1:], lefts.shape[0]) - 1
    return lefts[idx].copy(), cummax[ends].copy()


def merge_sorted(lefts: np.ndarray, rights: np.ndarray):
    """Merge intervals already sorted by left endpoint into a disjoint set."""
    if lefts.size == 0:
        return lefts.copy(), rights.copy()
    if HAVE_NUMBA:
        return _merge_loop(lefts, rights)
    return _merge_numpy(lefts, rights)


@njit(cache=True)
def _coverage_loop(lefts, rights, grid):  # pragma: no cover - numba path
    covered = np.zeros(grid, dtype=np.bool_)
    for i in range(lefts.shape[0]):
        lo = int(np.ceil(lefts[i] * grid))
        hi = int(np.ceil(rights[i] * grid))
        if hi > grid:
            hi = grid
        for j in range(lo, hi):
            if lefts[i] <= j / grid < rights[i]:
                covered[j] = True
    n = 0
    for j in range(grid):
        if covered[j]:
            n += 1
    return n


def _coverage_numpy(lefts, rights, grid):
    covered = np.zeros(grid, dtype=np.bool_)
    pts = np.arange(grid) / grid
    for l, r in zip(lefts, rights):
        lo = int(np.ceil(l * grid))
        hi = min(int(np.ceil(r * grid)), grid)
        if hi > lo:
            seg = pts[lo:hi]
            covered[lo:hi] |= (seg >= l) & (seg < r)
    return int(covered.sum())


def covered_gridpoints(lefts: np.ndarray, rights: np.ndarray, grid: int) -> int:
    """Number of grid points j/grid, j = 0..grid-1, inside the arc set.

    Arcs need not be disjoint; coverage is counted once per point.
    """
    if lefts.size == 0:
        return 0
    if HAVE_NUMBA:
        return int(_coverage_loop(lefts, rights, grid))
    return _coverage_numpy(lefts, rights, grid)


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
