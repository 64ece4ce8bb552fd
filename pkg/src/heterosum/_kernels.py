"""Numeric hot loops: score iteration, LCS tables, ward merges, block matching.

Every kernel exists in two variants: a numba ``@njit`` build (default when
numba imports) and a pure-numpy build. Set ``HETEROSUM_NO_NUMBA=1`` to force
the numpy path. Both variants implement identical recurrences so results
agree to float round-off; ``benchmarks/bench_kernels.py`` compares them.
"""

from __future__ import annotations

import os

import numpy as np

_PURE = os.environ.get("HETEROSUM_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}

if not _PURE:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):  # noqa: D103 - numba stand-in, keeps decorators inert
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


# ---------------------------------------------------------------------------
# score recurrence: s_new[i] = (1 - d) + d * sum_j mt[i, j] * s[j]
# mt[i, j] must hold w_ji / sum_k w_jk (transposed, out-degree normalized).
# ---------------------------------------------------------------------------


def _rank_iterate_np(mt, d, tau, max_iters):
    n = mt.shape[0]
    scores = np.ones(n, dtype=np.float64)
    base = 1.0 - d
    iters = 0
    converged = False
    while iters < max_iters:
        new = base + d * (mt @ scores)
        iters += 1
        delta = np.abs(new - scores).max() if n else 0.0
        scores = new
        if delta < tau:
            converged = True
            break
    return scores, iters, converged


@njit(cache=True)
def _rank_iterate_nb(mt, d, tau, max_iters):
    n = mt.shape[0]
    scores = np.ones(n, dtype=np.float64)
    base = 1.0 - d
    iters = 0
    converged = False
    while iters < max_iters:
        new = np.empty(n, dtype=np.float64)
        delta = 0.0
        for i in range(n):
            acc = 0.0
            for j in range(n):
                acc += mt[i, j] * scores[j]
            new[i] = base + d * acc
            diff = abs(new[i] - scores[i])
            if diff > delta:
                delta = diff
        iters += 1
        scores = new
        if delta < tau:
            converged = True
            break
    return scores, iters, converged


# ---------------------------------------------------------------------------
# LCS via the max-of-three recurrence
#   L[i, j] = max(L[i-1, j], L[i, j-1], L[i-1, j-1] + eq)
# The numpy variant turns the row update into a running maximum:
#   cur[1:] = accumulate(max(prev[1:], prev[:-1] + eq))
# ---------------------------------------------------------------------------


def _lcs_table_np(a, b):
    n, m = a.shape[0], b.shape[0]
    table = np.zeros((n + 1, m + 1), dtype=np.int32)
    for i in range(1, n + 1):
        eq = (b == a[i - 1]).astype(np.int32)
        upd = np.maximum(table[i - 1, 1:], table[i - 1, :-1] + eq)
        table[i, 1:] = np.maximum.accumulate(upd)
    return table


@njit(cache=True)
def _lcs_table_nb(a, b):
    n, m = a.shape[0], b.shape[0]
    table = np.zeros((n + 1, m + 1), dtype=np.int32)
    for i in range(1, n + 1):
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = table[i - 1, j]
            if table[i, j - 1] > best:
                best = table[i, j - 1]
            diag = table[i - 1, j - 1]
            if b[j - 1] == ai:
                diag += 1
            if diag > best:
                best = diag
            table[i, j] = best
    return table


def _lcs_backtrace(table, a, b):
    # Canonical alignment: prefer the diagonal match, then the a-side move.
    mask = np.zeros(a.shape[0], dtype=np.uint8)
    i, j = a.shape[0], b.shape[0]
    while i > 0 and j > 0:
        if a[i - 1] == b[j - 1] and table[i, j] == table[i - 1, j - 1] + 1:
            mask[i - 1] = 1
            i -= 1
            j -= 1
        elif table[i - 1, j] >= table[i, j - 1]:
            i -= 1
        else:
            j -= 1
    return mask


def _lcs_length_np(a, b):
    if a.shape[0] == 0 or b.shape[0] == 0:
        return 0
    return int(_lcs_table_np(a, b)[-1, -1])


@njit(cache=True)
def _lcs_length_nb(a, b):
    if a.shape[0] == 0 or b.shape[0] == 0:
        return 0
    return int(_lcs_table_nb(a, b)[-1, -1])


# ---------------------------------------------------------------------------
# Ward agglomeration by Lance-Williams updates on merge costs
#   cost(i, j) = |i||j| / (|i| + |j|) * ||mu_i - mu_j||^2
# Clusters merge while the global minimum cost stays <= stop_cost; the pair
# scan runs over ascending (i, j) with strict '<' so ties resolve to the
# smallest anchor indices. Anchor of a cluster == its smallest member.
# ---------------------------------------------------------------------------


def _ward_merge_np(cost, stop_cost):
    n = cost.shape[0]
    cost = cost.copy()
    sizes = np.ones(n, dtype=np.int64)
    parent = np.arange(n, dtype=np.int64)
    active = np.ones(n, dtype=np.bool_)
    cost[np.tril_indices(n)] = np.inf
    for _ in range(n - 1):
        flat = np.argmin(cost)
        i, j = divmod(int(flat), n)
        if not np.isfinite(cost[i, j]) or cost[i, j] > stop_cost:
            break
        cij = cost[i, j]
        si, sj = sizes[i], sizes[j]
        for k in range(n):
            if not active[k] or k == i or k == j:
                continue
            a, bnd = (i, k) if i < k else (k, i)
            cik = cost[a, bnd]
            a, bnd = (j, k) if j < k else (k, j)
            cjk = cost[a, bnd]
            sk = sizes[k]
            new = ((si + sk) * cik + (sj + sk) * cjk - sk * cij) / (si + sj + sk)
            a, bnd = (i, k) if i < k else (k, i)
            cost[a, bnd] = new
        active[j] = False
        parent[j] = i
        sizes[i] = si + sj
        cost[j, :] = np.inf
        cost[:, j] = np.inf
    return parent


@njit(cache=True)
def _ward_merge_nb(cost, stop_cost):
    n = cost.shape[0]
    work = cost.copy()
    sizes = np.ones(n, dtype=np.int64)
    parent = np.arange(n, dtype=np.int64)
    active = np.ones(n, dtype=np.bool_)
    for _ in range(n - 1):
        best = np.inf
        bi = -1
        bj = -1
        for i in range(n):
            if not active[i]:
                continue
            for j in range(i + 1, n):
                if not active[j]:
                    continue
                if work[i, j] < best:
                    best = work[i, j]
                    bi = i
                    bj = j
        if bi < 0 or best > stop_cost:
            break
        si, sj = sizes[bi], sizes[bj]
        for k in range(n):
            if not active[k] or k == bi or k == bj:
                continue
            cik = work[bi, k] if bi < k else work[k, bi]
            cjk = work[bj, k] if bj < k else work[k, bj]
            sk = sizes[k]
            new = ((si + sk) * cik + (sj + sk) * cjk - sk * best) / (si + sj + sk)
            if bi < k:
                work[bi, k] = new
            else:
                work[k, bi] = new
        active[bj] = False
        parent[bj] = bi
        sizes[bi] = si + sj
    return parent


# ---------------------------------------------------------------------------
# Total matched length of the recursive longest-common-block decomposition.
# Longest block ties resolve to smallest a-offset, then smallest b-offset.
# ---------------------------------------------------------------------------


def _block_matches_np(a, b):
    total = 0
    stack = [(0, a.shape[0], 0, b.shape[0])]
    while stack:
        alo, ahi, blo, bhi = stack.pop()
        if alo >= ahi or blo >= bhi:
            continue
        sub_b = b[blo:bhi]
        m = bhi - blo
        prev = np.zeros(m, dtype=np.int32)
        best_len = 0
        best_i = alo
        best_j = blo
        for i in range(alo, ahi):
            eq = (sub_b == a[i]).astype(np.int32)
            cur = np.empty(m, dtype=np.int32)
            cur[0] = eq[0]
            cur[1:] = (prev[:-1] + 1) * eq[1:]
            jmax = int(np.argmax(cur))
            if cur[jmax] > best_len:
                best_len = int(cur[jmax])
                best_i = i - best_len + 1
                best_j = blo + jmax - best_len + 1
            prev = cur
        if best_len > 0:
            total += best_len
            stack.append((alo, best_i, blo, best_j))
            stack.append((best_i + best_len, ahi, best_j + best_len, bhi))
    return total


@njit(cache=True)
def _block_matches_nb(a, b):
    total = 0
    cap = 2 * (a.shape[0] + b.shape[0]) + 4
    stack = np.empty((cap, 4), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = a.shape[0]
    stack[0, 2] = 0
    stack[0, 3] = b.shape[0]
    top = 1
    while top > 0:
        top -= 1
        alo, ahi, blo, bhi = stack[top, 0], stack[top, 1], stack[top, 2], stack[top, 3]
        if alo >= ahi or blo >= bhi:
            continue
        m = bhi - blo
        prev = np.zeros(m, dtype=np.int32)
        cur = np.zeros(m, dtype=np.int32)
        best_len = 0
        best_i = alo
        best_j = blo
        for i in range(alo, ahi):
            for j in range(m):
                if b[blo + j] == a[i]:
                    run = prev[j - 1] + 1 if j > 0 else 1
                else:
                    run = 0
                cur[j] = run
                if run > best_len:
                    best_len = run
                    best_i = i - run + 1
                    best_j = blo + j - run + 1
            tmp = prev
            prev = cur
            cur = tmp
        if best_len > 0:
            total += best_len
            stack[top, 0] = alo
            stack[top, 1] = best_i
            stack[top, 2] = blo
            stack[top, 3] = best_j
            top += 1
            stack[top, 0] = best_i + best_len
            stack[top, 1] = ahi
            stack[top, 2] = best_j + best_len
            stack[top, 3] = bhi
            top += 1
    return total


# public dispatch ------------------------------------------------------------

if NUMBA_ENABLED:
    rank_iterate = _rank_iterate_nb
    lcs_table = _lcs_table_nb
    lcs_length = _lcs_length_nb
    ward_merge = _ward_merge_nb
    block_matches = _block_matches_nb
else:
    rank_iterate = _rank_iterate_np
    lcs_table = _lcs_table_np
    lcs_length = _lcs_length_np
    ward_merge = _ward_merge_np
    block_matches = _block_matches_np

lcs_backtrace = _lcs_backtrace

IMPLEMENTATIONS = {
    "rank_iterate": {"numpy": _rank_iterate_np, "numba": _rank_iterate_nb},
    "lcs_table": {"numpy": _lcs_table_np, "numba": _lcs_table_nb},
    "ward_merge": {"numpy": _ward_merge_np, "numba": _ward_merge_nb},
    "block_matches": {"numpy": _block_matches_np, "numba": _block_matches_nb},
}


def warmup():
    """Trigger JIT compilation on toy inputs so timed sections stay honest."""
    mt = np.array([[0.0, 1.0], [1.0, 0.0]])
    rank_iterate(mt, 0.85, 1e-4, 10)
    a = np.array([1, 2, 3], dtype=np.int32)
    b = np.array([2, 3, 4], dtype=np.int32)
    lcs_table(a, b)
    lcs_length(a, b)
    block_matches(a, b)
    cost = np.array([[np.inf, 0.5], [np.inf, np.inf]])
    ward_merge(cost, 2.0)
