"""Hot loops, compiled with numba when available.

Set ``SEMIRANDOM_NO_NUMBA=1`` to force the pure-numpy versions. Both variants
consume the same inputs and return identical results.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - depends on the environment
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and os.environ.get("SEMIRANDOM_NO_NUMBA", "") in ("", "0")


# ------------------------------------------------------------ numpy versions

def floyd_resolve_np(raw: np.ndarray, n: int) -> np.ndarray:
    """Floyd's sampling: row i of ``raw`` holds draws t_j in [0, n-r+j]; returns sorted 1-based r-subsets."""
    B, r = raw.shape
    out = np.empty((B, r), dtype=np.int64)
    for j in range(r):
        cand = raw[:, j].copy()
        top = n - r + j
        if j:
            clash = (out[:, :j] == cand[:, None]).any(axis=1)
            cand[clash] = top
        out[:, j] = cand
    out.sort(axis=1)
    return out + 1


def count_duplicates_np(codes: np.ndarray) -> int:
    return int(codes.size - np.unique(codes).size)


def dp_run_np(cur: np.ndarray, nxt: np.ndarray, p: float, steps: int) -> np.ndarray:
    S = cur.size
    q = nxt.shape[0]
    stay = 1.0 - q * p
    cur = cur.copy()
    for _ in range(steps):
        new = cur * stay
        w = cur * p
        for i in range(q):
            new += np.bincount(nxt[i], weights=w, minlength=S)
        cur = new
    return cur


def count_k4_np(adj: np.ndarray) -> int:
    """Number of 4-cliques in a simple graph given by a boolean adjacency matrix."""
    A = adj.astype(np.int64)
    n = A.shape[0]
    total = 0
    for i in range(n):
        nb = np.nonzero(A[i, i + 1:])[0] + i + 1
        if nb.size < 3:
            continue
        sub = A[np.ix_(nb, nb)]
        total += int(np.trace(sub @ sub @ sub)) // 6
    return total


# ------------------------------------------------------------ numba versions

if _HAVE_NUMBA:

    @njit(cache=True)
    def floyd_resolve_nb(raw, n):  # pragma: no cover - compiled
        B, r = raw.shape
        out = np.empty((B, r), dtype=np.int64)
        for b in range(B):
            for j in range(r):
                cand = raw[b, j]
                top = n - r + j
                for i in range(j):
                    if out[b, i] == cand:
                        cand = top
                        break
                out[b, j] = cand
            # insertion sort; r is small
            for j in range(1, r):
                x = out[b, j]
                i = j - 1
                while i >= 0 and out[b, i] > x:
                    out[b, i + 1] = out[b, i]
                    i -= 1
                out[b, i + 1] = x
            for j in range(r):
                out[b, j] += 1
        return out

    @njit(cache=True)
    def count_duplicates_nb(codes):  # pragma: no cover - compiled
        if codes.size == 0:
            return 0
        srt = np.sort(codes)
        dup = 0
        for i in range(1, srt.size):
            if srt[i] == srt[i - 1]:
                dup += 1
        return dup

    @njit(cache=True)
    def dp_run_nb(cur, nxt, p, steps):  # pragma: no cover - compiled
        S = cur.size
        q = nxt.shape[0]
        # gather form: each state sums its predecessors in a register and is written once
        pred = np.full((S, q), -1, dtype=np.int64)
        npred = np.zeros(S, dtype=np.int64)
        loops = np.zeros(S, dtype=np.int64)
        for i in range(q):
            for s in range(S):
                j = nxt[i, s]
                if j == s:
                    loops[s] += 1
                else:
                    pred[j, npred[j]] = s
                    npred[j] += 1
        selfw = np.empty(S)
        for s in range(S):
            selfw[s] = 1.0 - (q - loops[s]) * p
        a = cur.copy()
        b = np.empty(S)
        for _ in range(steps):
            for s in range(S):
                acc = a[s] * selfw[s]
                inflow = 0.0
                for k in range(npred[s]):
                    inflow += a[pred[s, k]]
                b[s] = acc + inflow * p
            a, b = b, a
        return a

    @njit(cache=True)
    def count_k4_nb(adj):  # pragma: no cover - compiled
        n = adj.shape[0]
        total = 0
        for a in range(n):
            for b in range(a + 1, n):
                if not adj[a, b]:
                    continue
                for c in range(b + 1, n):
                    if not (adj[a, c] and adj[b, c]):
                        continue
                    for d in range(c + 1, n):
                        if adj[a, d] and adj[b, d] and adj[c, d]:
                            total += 1
        return total


def floyd_resolve(raw, n):
    raw = np.ascontiguousarray(raw, dtype=np.int64)
    return floyd_resolve_nb(raw, n) if USE_NUMBA else floyd_resolve_np(raw, n)


def count_duplicates(codes):
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    # numpy's vectorized sort beats the compiled loop here (see benchmarks/bench_kernels.py)
    return count_duplicates_np(codes)


def dp_run(cur, nxt, p, steps):
    cur = np.ascontiguousarray(cur, dtype=np.float64)
    nxt = np.ascontiguousarray(nxt, dtype=np.int64)
    return dp_run_nb(cur, nxt, float(p), int(steps)) if USE_NUMBA else dp_run_np(cur, nxt, p, steps)


def count_k4(adj):
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    return int(count_k4_nb(adj)) if USE_NUMBA else count_k4_np(adj)
