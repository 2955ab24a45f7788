"""Hot evaluation kernels for the shipped objectives.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The numba path is used when numba
imports and ``SUBCOVER_DISABLE_NUMBA`` is unset (or ``0``); otherwise the
numpy path is used.  ``benchmarks/bench_kernels.py`` times both.

All kernels take CSR adjacency (``indptr``/``indices``) plus a ``members``
array of element indices.  ``members`` may contain duplicates; they are
counted once.
"""
import os

import numpy as np


def _env_disabled():
    return os.environ.get("SUBCOVER_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()


# ---------------------------------------------------------------------------
# numpy reference path


def _gather(indptr, members):
    """Positions into ``indices`` covering the CSR rows of ``members``."""
    starts = indptr[members]
    lens = indptr[members + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.repeat(starts - np.cumsum(lens) + lens, lens)
    return offsets + np.arange(total, dtype=np.int64)


def cut_value_np(indptr, indices, weights, members, n):
    members = np.unique(members)
    if members.size == 0:
        return 0.0
    mask = np.zeros(n, dtype=np.bool_)
    mask[members] = True
    pos = _gather(indptr, members)
    if pos.size == 0:
        return 0.0
    crossing = ~mask[indices[pos]]
    return float(weights[pos][crossing].sum())


def coverage_value_np(indptr, tags, tag_weights, members, n_tags):
    members = np.unique(members)
    if members.size == 0:
        return 0.0
    pos = _gather(indptr, members)
    covered = np.zeros(n_tags, dtype=np.bool_)
    covered[tags[pos]] = True
    return float(tag_weights[covered].sum())


def pair_similarity_sum_np(indptr, tags, members, n_tags, literal):
    """Sum of sim(x, y) over ordered pairs x != y of distinct members."""
    members = np.unique(members)
    k = members.size
    if k < 2:
        return 0.0
    pos = _gather(indptr, members)
    lens = indptr[members + 1] - indptr[members]
    rows = np.repeat(np.arange(k), lens)
    local, cols = np.unique(tags[pos], return_inverse=True)
    inc = np.zeros((k, local.size), dtype=np.float64)
    inc[rows, cols] = 1.0
    inter = inc @ inc.T
    sizes = lens.astype(np.float64)
    union = sizes[:, None] + sizes[None, :] - inter
    np.fill_diagonal(inter, 0.0)
    if literal:
        with np.errstate(divide="ignore", invalid="ignore"):
            sim = np.where(inter > 0, union / np.where(inter > 0, inter, 1.0), 0.0)
    else:
        sim = inter / union
    np.fill_diagonal(sim, 0.0)
    return float(sim.sum())


# ---------------------------------------------------------------------------
# numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def cut_value_nb(indptr, indices, weights, members, n):
        state = np.zeros(n, dtype=np.int8)
        for m in members:
            state[m] = 1
        total = 0.0
        for m in members:
            if state[m] != 1:
                continue
            state[m] = 2
            for k in range(indptr[m], indptr[m + 1]):
                if state[indices[k]] == 0:
                    total += weights[k]
        return total

    @njit(cache=True)
    def coverage_value_nb(indptr, tags, tag_weights, members, n_tags):
        covered = np.zeros(n_tags, dtype=np.bool_)
        total = 0.0
        for m in members:
            for k in range(indptr[m], indptr[m + 1]):
                t = tags[k]
                if not covered[t]:
                    covered[t] = True
                    total += tag_weights[t]
        return total

    @njit(cache=True)
    def pair_similarity_sum_nb(indptr, tags, members, n_tags, literal):
        uniq = np.unique(members)
        k = uniq.size
        total = 0.0
        for a in range(k):
            xa = uniq[a]
            sa, ea = indptr[xa], indptr[xa + 1]
            for b in range(a + 1, k):
                xb = uniq[b]
                sb, eb = indptr[xb], indptr[xb + 1]
                # tag rows are sorted: merge to count the intersection
                i, j, inter = sa, sb, 0
                while i < ea and j < eb:
                    ti, tj = tags[i], tags[j]
                    if ti == tj:
                        inter += 1
                        i += 1
                        j += 1
                    elif ti < tj:
                        i += 1
                    else:
                        j += 1
                union = (ea - sa) + (eb - sb) - inter
                if literal:
                    if inter > 0:
                        total += 2.0 * union / inter
                else:
                    total += 2.0 * inter / union
        return total

else:  # pragma: no cover
    cut_value_nb = cut_value_np
    coverage_value_nb = coverage_value_np
    pair_similarity_sum_nb = pair_similarity_sum_np


if USE_NUMBA:
    cut_value = cut_value_nb
    coverage_value = coverage_value_nb
    pair_similarity_sum = pair_similarity_sum_nb
else:
    cut_value = cut_value_np
    coverage_value = coverage_value_np
    pair_similarity_sum = pair_similarity_sum_np


def backend():
    """Name of the active kernel backend."""
    return "numba" if USE_NUMBA else "numpy"
