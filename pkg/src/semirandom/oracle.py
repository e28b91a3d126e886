"""Independent exact and brute-force checks.

Nothing here calls the closed-form bound code in :mod:`semirandom.analysis`
when checking it; each claim is recomputed by enumeration or exact counting.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import _kernels
from .hypergraph import (MultiHypergraph, ParameterError, ResourceError, TargetSpec, build_target, iter_embeddings,
                         min_cycle_length, tight_cycle_edges, tight_path_edges)


MAX_DP_STATES = 10 ** 7
EXACT_WORK_LIMIT = 2 * 10 ** 6


# ------------------------------------------------------------ hit probability

@dataclass
class HitDP:
    """Capped hit-count chain for ``q`` distinct r-sets with required multiplicities."""

    mults: tuple
    N: int  # number of r-sets overall

    def __post_init__(self):
        if any(m < 1 for m in self.mults):
            raise ParameterError("multiplicities must be positive")
        if len(self.mults) > self.N:
            raise ParameterError("more required sets than r-sets exist")

    @property
    def num_states(self) -> int:
        return math.prod(m + 1 for m in self.mults)

    def transitions(self) -> np.ndarray:
        """(q, S) array: state index after hitting set i from each state."""
        q = len(self.mults)
        S = self.num_states
        radix = [1]
        for m in self.mults[:-1]:
            radix.append(radix[-1] * (m + 1))
        idx = np.arange(S, dtype=np.int64)
        nxt = np.empty((q, S), dtype=np.int64)
        for i, m in enumerate(self.mults):
            digit = (idx // radix[i]) % (m + 1)
            nxt[i] = idx + np.where(digit < m, radix[i], 0)
        return nxt

    def run_float(self, t: int) -> tuple[float, float]:
        S = self.num_states
        cur = np.zeros(S)
        cur[0] = 1.0
        out = _kernels.dp_run(cur, self.transitions(), 1.0 / self.N, t)
        drift = abs(float(out.sum()) - 1.0)
        # rounding bound: a few ulps per state per step, plus the observed mass drift
        err = drift + 4 * np.finfo(float).eps * max(t, 1) * len(self.mults)
        return float(out[-1]), err

    def run_exact(self, t: int) -> Fraction:
        """Exact probability via integer sequence counts (denominator N^t)."""
        q = len(self.mults)
        nxt = self.transitions()
        cur = np.zeros(self.num_states, dtype=object)
        cur[:] = 0
        cur[0] = 1
        other = self.N - q
        for _ in range(t):
            new = cur * other
            for i in range(q):
                np.add.at(new, nxt[i], cur)
            cur = new
        return Fraction(int(cur[-1]), self.N ** t)


@dataclass
class HitResult:
    probability: float
    mode: str
    exact: Fraction | None = None
    error_bound: float = 0.0

    def to_dict(self) -> dict:
        d = {"probability": self.probability, "mode": self.mode, "error_bound": self.error_bound}
        if self.exact is not None:
            d["num"], d["den"] = str(self.exact.numerator), str(self.exact.denominator)
        return d


def _normalize_required(required, r):
    if not required:
        raise ParameterError("need at least one required r-set")
    mults, seen = [], set()
    for item in required:
        if isinstance(item, int):
            mults.append(item)
            continue
        rset, m = item
        key = tuple(sorted(rset))
        if len(key) != r or len(set(key)) != r:
            raise ParameterError(f"{rset} is not an {r}-set")
        if key in seen:
            raise ParameterError(f"r-set {key} listed twice")
        seen.add(key)
        mults.append(int(m))
    return tuple(mults)


def exact_hit_probability(required, n: int, r: int, t: int, mode: str = "auto") -> HitResult:
    """Probability that ``t`` uniform r-set draws hit the i-th listed set at least ``m_i`` times for all i.

    ``required`` lists (r-set, multiplicity) pairs, or bare multiplicities.
    ``mode`` is ``"exact"`` (rational), ``"float"`` or ``"auto"``.
    """
    if t < 0:
        raise ParameterError("t must be non-negative")
    if mode not in ("auto", "exact", "float"):
        raise ParameterError(f"unknown mode {mode!r}")
    mults = _normalize_required(required, r)
    dp = HitDP(mults, math.comb(n, r))
    S = dp.num_states
    if S > MAX_DP_STATES:
        raise ResourceError(f"state space {S} exceeds {MAX_DP_STATES}")
    if mode == "exact" or (mode == "auto" and S * max(t, 1) * len(mults) <= EXACT_WORK_LIMIT):
        val = dp.run_exact(t)
        return HitResult(float(val), "exact", val, 0.0)
    p, err = dp.run_float(t)
    return HitResult(p, "float", None, float(err))


def hit_probability_egf(mults: Iterable[int], N: int, t: int) -> Fraction:
    """Same probability by inclusion of exponential generating functions (second exact method).

    Counts length-t words over N letters in which letter i occurs at least m_i times:
    t! [x^t] prod_i (e^x - sum_{j<m_i} x^j/j!) * e^{(N-q)x}.
    """
    mults = list(mults)
    q = len(mults)
    poly = [Fraction(0)] * (t + 1)
    poly[0] = Fraction(1)
    for m in mults:
        factor = [Fraction(0) if j < m else Fraction(1, math.factorial(j)) for j in range(t + 1)]
        poly = _mul_trunc(poly, factor, t)
    rest = [Fraction((N - q) ** j, math.factorial(j)) for j in range(t + 1)]
    poly = _mul_trunc(poly, rest, t)
    return poly[t] * math.factorial(t) / Fraction(N) ** t


def _mul_trunc(a, b, deg):
    out = [Fraction(0)] * (deg + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(deg + 1 - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def multi_asymptotic(mults: Iterable[int], n: int, r: int, t: int) -> float:
    """Leading-order value p^m / prod m_i! with p = t / C(n, r)."""
    mults = list(mults)
    p = t / math.comb(n, r)
    return p ** sum(mults) / math.prod(math.factorial(m) for m in mults)


# ---------------------------------------------------------------- Phi_F

@dataclass
class PhiResult:
    log_value: float
    v: int
    e: int
    vertices: tuple
    value: Fraction | None = None


def phi_F(F: MultiHypergraph, n: int, p) -> PhiResult:
    """Minimum of n^v p^e over sub-hypergraphs with at least one edge.

    For a fixed vertex set the induced subgraph minimizes (p < 1), so the
    search runs over vertex subsets. ``p`` may be a Fraction (exact value
    reported) or a float.
    """
    if not 0 < p < 1:
        raise ParameterError("need 0 < p < 1")
    if F.num_edges == 0:
        raise ParameterError("F must have an edge")
    verts = F.vertices()
    logn, logp = math.log(n), math.log(p)
    best = None
    for size in range(F.s, len(verts) + 1):
        for W in itertools.combinations(verts, size):
            Ws = set(W)
            e = sum(m for ed, m in F.edges.items() if Ws.issuperset(ed))
            if e == 0:
                continue
            lv = size * logn + e * logp
            key = (lv, size, W)
            if best is None or key < best[0]:
                best = (key, size, e, W)
    (lv, _, _), v, e, W = best
    exact = Fraction(n) ** v * Fraction(p) ** e if isinstance(p, Fraction) else None
    return PhiResult(lv, v, e, tuple(W), exact)


# ------------------------------------------------------ counting bound (X_j)

def count_heavy_ksets(G: MultiHypergraph, k: int, j: int, n: int, limit: int = 2 * 10 ** 7) -> int:
    """Number of k-subsets of [n] spanning at least ``j`` edges of G, counted with multiplicity."""
    s = G.s
    if j < 1:
        raise ParameterError("j must be >= 1")
    if k < s:
        return 0
    edges = G.edges
    if not edges:
        return 0
    extra = k - s
    if j == 1:
        return _count_one_edge(G, k, n, limit)
    cands: set = set()
    work = 0
    for e, m in edges.items():
        if m >= j:
            work += math.comb(n - s, extra)
            if work > limit:
                raise ResourceError(f"counting X_{j}: too many candidate sets")
            rest = [v for v in range(1, n + 1) if v not in e]
            for add in itertools.combinations(rest, extra):
                cands.add(tuple(sorted(e + add)))
    # a k-set with >= 2 edge copies from distinct edges contains two distinct edges
    inc = G._incidence
    elist = list(edges)
    for e in elist:
        partners = set()
        if 2 * s <= k:
            partners.update(elist)
        else:
            for v in e:
                partners.update(inc[v])
        for f in partners:
            if f <= e:
                continue
            U = tuple(sorted(set(e) | set(f)))
            if len(U) > k:
                continue
            rest_n = k - len(U)
            work += math.comb(n - len(U), rest_n)
            if work > limit:
                raise ResourceError(f"counting X_{j}: too many candidate sets")
            if rest_n == 0:
                cands.add(U)
            else:
                others = [v for v in range(1, n + 1) if v not in set(U)]
                for add in itertools.combinations(others, rest_n):
                    cands.add(tuple(sorted(U + add)))
    count = 0
    for W in cands:
        w = 0
        for S in itertools.combinations(W, s):
            w += edges.get(S, 0)
        if w >= j:
            count += 1
    return count


def _count_one_edge(G, k, n, limit):
    s = G.s
    extra = k - s
    E = np.array(list(G.edges), dtype=np.int64)
    D = E.shape[0]
    if D * math.comb(n - s, extra) > limit:
        raise ResourceError("counting X_1: too many candidate sets")
    if extra == 0:
        return D
    if extra == 1:
        allv = np.arange(1, n + 1, dtype=np.int64)
        rows = np.repeat(E, n, axis=0)
        add = np.tile(allv, D)
        keep = ~(rows == add[:, None]).any(axis=1)
        W = np.sort(np.concatenate([rows[keep], add[keep][:, None]], axis=1), axis=1)
        codes = np.zeros(W.shape[0], dtype=np.int64)
        for c in range(k):
            codes = codes * (n + 1) + W[:, c]
        return int(np.unique(codes).size)
    seen = set()
    for e in G.edges:
        rest = [v for v in range(1, n + 1) if v not in e]
        for add in itertools.combinations(rest, extra):
            seen.add(tuple(sorted(e + add)))
    return len(seen)


def counting_bound(j: int, t: int, n: int, k: int, s: int, r: int) -> float:
    """Upper bound t^j k^{r(j-1)} n^{k-s+r-rj} on E X_j(t)."""
    return float(t) ** j * float(k) ** (r * (j - 1)) * float(n) ** (k - s + r - r * j)


@dataclass
class CountingReport:
    n: int
    t: int
    trials: int
    js: tuple
    means: dict
    stderrs: dict
    bounds: dict
    x1_deterministic_ok: bool
    x1_deterministic_bound: int

    def passed(self) -> bool:
        return self.x1_deterministic_ok and all(self.means[j] <= self.bounds[j] for j in self.js)

    def to_dict(self) -> dict:
        return {"n": self.n, "t": self.t, "trials": self.trials,
                "per_j": [{"j": j, "mean": self.means[j], "stderr": self.stderrs[j],
                           "bound": self.bounds[j]} for j in self.js],
                "x1_deterministic_bound": self.x1_deterministic_bound,
                "x1_deterministic_ok": self.x1_deterministic_ok, "passed": self.passed()}


def expectation_bound_check(H: MultiHypergraph, r: int, strategy_factory: Callable, n: int, t: int,
                            trials: int, seed: int = 0, js=None) -> CountingReport:
    """Monte Carlo means of X_j(t) under a strategy against the bound on E X_j."""
    from .process import run

    k, s, m = H.num_vertices, H.s, H.num_edges
    js = tuple(js) if js is not None else tuple(sorted({1, m}))
    sums = {j: 0.0 for j in js}
    sq = {j: 0.0 for j in js}
    x1_bound = t * math.comb(n - s, k - s)
    det_ok = True
    for i in range(trials):
        out = run(n, r, s, strategy_factory(), None, t, seed=seed, trial=i)
        for j in js:
            x = count_heavy_ksets(out.final_graph, k, j, n)
            sums[j] += x
            sq[j] += x * x
            if j == 1 and x > x1_bound:
                det_ok = False
    means = {j: sums[j] / trials for j in js}
    errs = {j: math.sqrt(max(sq[j] / trials - means[j] ** 2, 0.0) / trials) for j in js}
    bounds = {j: counting_bound(j, t, n, k, s, r) for j in js}
    return CountingReport(n, t, trials, js, means, errs, bounds, det_ok, x1_bound)


# ---------------------------------------------- doubled K4 with a root

DOUBLE_K4_MULTS = (2,) * 6 + (1,) * 4


def double_k4_expected(n: int, t: int, mode: str = "float") -> float:
    """Exact mean number of 4-sets in [n-2] carrying the doubled K4 pattern rooted at n-1."""
    res = exact_hit_probability(list(DOUBLE_K4_MULTS), n, 2, t, mode=mode)
    return math.comb(n - 2, 4) * res.probability


def double_k4_count(n: int, t: int, rng: np.random.Generator) -> int:
    """Sample t uniform pairs of [n] and count 4-sets of [n-2] whose six pairs are hit twice
    and whose four pairs with vertex n-1 are hit at least once."""
    raw = np.empty((t, 2), dtype=np.int64)
    raw[:, 0] = rng.integers(0, n - 1, size=t)
    raw[:, 1] = rng.integers(0, n, size=t)
    pairs = _kernels.floyd_resolve(raw, n) - 1
    A = np.zeros((n, n), dtype=np.int64)
    np.add.at(A, (pairs[:, 0], pairs[:, 1]), 1)
    A = A + A.T
    root = n - 2  # vertex n-1 in 1-based labels
    keep = np.nonzero(A[: n - 2, root] >= 1)[0]
    sub = A[np.ix_(keep, keep)] >= 2
    return _kernels.count_k4(sub)


def calibrate_double_k4(n: int, target_mean: float = 10.0) -> int:
    """Smallest t whose exact mean count reaches ``target_mean``."""
    lo, hi = 1, math.comb(n, 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if double_k4_expected(n, mid) >= target_mean:
            hi = mid
        else:
            lo = mid + 1
    return lo


# ------------------------------------------------------- supporting-claim checks

@dataclass
class ClaimResult:
    claim: str
    range: dict
    status: str  # "pass" or "fail"
    checked: int
    counterexample: object = None
    notes: str = ""

    def to_dict(self) -> dict:
        d = {"claim": self.claim, "range": self.range, "status": self.status, "checked": self.checked}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.notes:
            d["notes"] = self.notes
        return d


def _subset_tables(v, u):
    """Edge list of the complete u-graph on range(v) and per-vertex-subset edge masks."""
    edges = list(itertools.combinations(range(v), u))
    subset_mask = np.zeros(1 << v, dtype=np.int64)
    for bit, e in enumerate(edges):
        em = sum(1 << x for x in e)
        for W in range(1 << v):
            if W & em == em:
                subset_mask[W] |= 1 << bit
    return edges, subset_mask


def _g_le(num1, den1, num2, den2):
    return num1 * den2 <= num2 * den1


def _g_pair(e, v, u):
    """Numerator/denominator arrays of g for edge counts ``e`` on ``v`` vertices."""
    e = np.asarray(e, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    single = e == 1
    num = np.where(single, 1, e - 1)
    den = np.where(single, u, np.maximum(v - u, 1))
    return num, den


def edge_balanced_implies_balanced(u: int, v: int, chunk: int = 1 << 17):
    """Exhaustive search over u-graphs on exactly v non-isolated vertices.

    Returns (number of graphs checked, first counterexample edge list or None).
    """
    edges, smask = _subset_tables(v, u)
    nE = len(edges)
    Ws = np.arange(1, 1 << v)
    Wsize = np.array([bin(W).count("1") for W in Ws], dtype=np.int64)
    Wmask = smask[Ws]
    vert_inc = [sum(1 << b for b, e in enumerate(edges) if x in e) for x in range(v)]
    checked = 0
    for start in range(1, 1 << nE, chunk):
        G = np.arange(start, min(start + chunk, 1 << nE), dtype=np.int64)
        cover = np.ones(G.size, dtype=bool)
        for x in range(v):
            cover &= (G & vert_inc[x]) != 0
        G = G[cover]
        if G.size == 0:
            continue
        checked += G.size
        e = np.bitwise_count(G).astype(np.int64)
        eW = np.bitwise_count(G[:, None] & Wmask[None, :]).astype(np.int64)
        gn, gd = _g_pair(e, v, u)
        wn, wd = _g_pair(eW, Wsize[None, :], u)
        has = eW >= 1
        eb = np.all(~has | (wn * gd[:, None] <= gn[:, None] * wd), axis=1)
        bal = np.all(eW * v <= e[:, None] * Wsize[None, :], axis=1)
        bad = np.nonzero(eb & ~bal)[0]
        if bad.size:
            g = int(G[bad[0]])
            return checked, [list(edges[b]) for b in range(nE) if g >> b & 1]
    return checked, None


def _induced_counts(H: MultiHypergraph):
    verts = H.vertices()
    idx = {x: i for i, x in enumerate(verts)}
    em = [(sum(1 << idx[x] for x in e), m) for e, m in H.edges.items()]
    out = []
    for W in range(1, 1 << len(verts)):
        out.append((W, bin(W).count("1"), sum(m for mask, m in em if W & mask == mask)))
    return verts, out


def _brute_edge_balanced(H: MultiHypergraph):
    u = H.s
    _, rows = _induced_counts(H)
    v, e = H.num_vertices, H.num_edges
    gF = Fraction(1, u) if e == 1 else Fraction(e - 1, v - u)
    for W, size, eW in rows:
        if eW == 0:
            continue
        gW = Fraction(1, u) if eW == 1 else Fraction(eW - 1, size - u)
        if gW > gF:
            return False, gF
    return True, gF


def _brute_mu(H: MultiHypergraph, r: int) -> Fraction:
    s = H.s
    _, rows = _induced_counts(H)
    return max(Fraction(eW, size - s + r) for W, size, eW in rows if size >= s)


def _brute_degeneracy(H: MultiHypergraph) -> int:
    verts, rows = _induced_counts(H)
    idx = {x: i for i, x in enumerate(verts)}
    em = [(sum(1 << idx[x] for x in e), m) for e, m in H.edges.items()]
    best = 0
    for W, size, _ in rows:
        mindeg = min(sum(m for mask, m in em if W & mask == mask and mask >> i & 1)
                     for i in range(len(verts)) if W >> i & 1)
        best = max(best, mindeg)
    return best


def _cycle_grid(max_v, s_range, need_m=None):
    for s in s_range:
        for ell in range(1, s):
            m = max(2, min_cycle_length(s, ell))
            while (s - ell) * m <= max_v:
                try:
                    C = build_target(TargetSpec.tight_cycle(m, s, ell))
                except ParameterError:
                    m += 1
                    continue
                yield s, ell, m, C
                m += 1


def check_edge_balanced_implies_balanced(ranges) -> ClaimResult:
    total = 0
    for u, vmax in ranges:
        for v in range(u + 1, vmax + 1):
            n, ce = edge_balanced_implies_balanced(u, v)
            total += n
            if ce is not None:
                return ClaimResult("edge_balanced_implies_balanced", {"cases": ranges}, "fail", total, {"u": u, "v": v, "edges": ce})
    return ClaimResult("edge_balanced_implies_balanced", {"cases": [list(x) for x in ranges]}, "pass", total)


def check_path_cycle_degeneracy(max_v=12, s_range=range(2, 7)) -> ClaimResult:
    checked = 0
    for s in s_range:
        for ell in range(1, s):
            m = 1
            while (s - ell) * m + ell <= max_v:
                P = MultiHypergraph(s, edges=tight_path_edges(m, s, ell))
                checked += 1
                if _brute_degeneracy(P) != 1:
                    return ClaimResult("path_cycle_degeneracy", {"max_v": max_v}, "fail", checked,
                                       {"kind": "path", "m": m, "s": s, "ell": ell})
                m += 1
    for s, ell, m, C in _cycle_grid(max_v, s_range):
        checked += 1
        if _brute_degeneracy(C) != s // (s - ell):
            return ClaimResult("path_cycle_degeneracy", {"max_v": max_v}, "fail", checked,
                               {"kind": "cycle", "m": m, "s": s, "ell": ell, "d": _brute_degeneracy(C)})
    return ClaimResult("path_cycle_degeneracy", {"max_v": max_v, "s": [min(s_range), max(s_range)]}, "pass", checked)


def check_path_cycle_mu(max_v=12, s_range=range(3, 7)) -> ClaimResult:
    checked = 0
    rng_desc = {"max_v": max_v, "s": [min(s_range), max(s_range)], "r": "2..s-1"}
    for s in s_range:
        for ell in range(1, s):
            for r in range(2, s):
                m = 1
                while (s - ell) * m + ell <= max_v:
                    P = MultiHypergraph(s, edges=tight_path_edges(m, s, ell))
                    want = Fraction(1, r) if r <= s - ell else Fraction(m, (s - ell) * m + ell - s + r)
                    checked += 1
                    if _brute_mu(P, r) != want:
                        return ClaimResult("path_cycle_mu", rng_desc, "fail", checked,
                                           {"kind": "path", "m": m, "s": s, "ell": ell, "r": r})
                    m += 1
    for s, ell, m, C in _cycle_grid(max_v, s_range):
        for r in range(2, s):
            den = (s - ell) * m - s + r
            want = max(Fraction(m, den), Fraction(1, r))
            checked += 1
            got = _brute_mu(C, r)
            if got != want:
                return ClaimResult("path_cycle_mu", rng_desc, "fail", checked,
                                   {"kind": "cycle", "m": m, "s": s, "ell": ell, "r": r,
                                    "brute": str(got), "formula": str(want)})
    return ClaimResult("path_cycle_mu", rng_desc, "pass", checked)


def check_tight_cycle_edge_balanced(max_m=12, s_range=range(2, 6)) -> ClaimResult:
    checked = 0
    for s in s_range:
        for m in range(s + 1, max_m + 1):
            C = MultiHypergraph(s, edges=tight_cycle_edges(m, s, s - 1))
            ok, g = _brute_edge_balanced(C)
            checked += 1
            if not ok or g != Fraction(m - 1, m - s):
                return ClaimResult("tight_cycle_edge_balanced", {"max_m": max_m}, "fail", checked, {"m": m, "s": s})
    return ClaimResult("tight_cycle_edge_balanced", {"max_m": max_m, "s": [min(s_range), max(s_range)]}, "pass", checked)


def check_clique_edge_balanced(max_t=9, r_range=range(2, 5)) -> ClaimResult:
    checked = 0
    for r in r_range:
        for t in range(r + 1, max_t + 1):
            K = MultiHypergraph(r, edges=itertools.combinations(range(1, t + 1), r))
            ok, _ = _brute_edge_balanced(K)
            checked += 1
            if not ok:
                return ClaimResult("clique_edge_balanced", {"max_t": max_t}, "fail", checked, {"t": t, "r": r})
    return ClaimResult("clique_edge_balanced", {"max_t": max_t, "r": [min(r_range), max(r_range)]}, "pass", checked)


def check_binomial_inequality(max_s=30) -> ClaimResult:
    checked = 0
    for s in range(3, max_s + 1):
        for k in range(s + 1, 2 * s):
            lhs = math.comb(k - 1, s) * (k - s)
            rhs = (s - 1) * math.comb(k - 1, s - 1) - (k - 1)
            checked += 1
            if lhs > rhs:
                return ClaimResult("binomial_inequality", {"s": [3, max_s]}, "fail", checked, {"s": s, "k": k})
    return ClaimResult("binomial_inequality", {"s": [3, max_s]}, "pass", checked)


def check_starplus_balanced(max_k=9, max_s=5, samples=3, seed=0) -> ClaimResult:
    rng = np.random.default_rng(seed)
    checked = 0
    for s in range(3, max_s + 1):
        for r in range(2, s):
            c = s - r
            for k in range(s + 1, max_k + 1):
                center = tuple(range(1, c + 1))
                rays = [center + T for T in itertools.combinations(range(c + 1, k + 1), r)]
                pool = [e for e in itertools.combinations(range(1, k + 1), s) if not set(center) <= set(e)]
                num = r * math.comb(k - c, r) - (k - c)
                lam_max = min(len(pool), num // (k - s))
                for lam in range(0, lam_max + 1):
                    caps = [pool[:lam]] + [
                        [pool[i] for i in sorted(rng.choice(len(pool), lam, replace=False))]
                        for _ in range(samples)]
                    for cap in caps:
                        H = MultiHypergraph(s, edges=rays + cap)
                        checked += 1
                        f = Fraction(H.num_edges, H.num_vertices - s + r)
                        if _brute_mu(H, r) != f:
                            return ClaimResult("starplus_balanced", {"max_k": max_k, "max_s": max_s}, "fail", checked,
                                               {"s": s, "r": r, "k": k, "cap": [list(e) for e in cap]})
    return ClaimResult("starplus_balanced", {"max_k": max_k, "max_s": max_s, "random_caps": samples}, "pass", checked)


def _falling(x, s):
    out = 1
    for i in range(s):
        out *= x - i
    return out


def _f_s(k, ell, s):
    return Fraction(_falling(k, s) - _falling(ell, s), k - ell)


def check_falling_quotient_monotone(max_k=40, s_range=range(2, 9)) -> ClaimResult:
    checked = 0
    for s in s_range:
        for k in range(max(s, 1), max_k + 1):
            for ell in range(0, k):
                checked += 1
                a = _f_s(k, ell, s)
                if ell + 1 < k and not a < _f_s(k, ell + 1, s):
                    return ClaimResult("falling_quotient_monotone", {"max_k": max_k}, "fail", checked,
                                       {"s": s, "k": k, "ell": ell, "direction": "ell"})
                if not a < _f_s(k + 1, ell, s):
                    return ClaimResult("falling_quotient_monotone", {"max_k": max_k}, "fail", checked,
                                       {"s": s, "k": k, "ell": ell, "direction": "k"})
    return ClaimResult("falling_quotient_monotone", {"max_k": max_k, "s": [min(s_range), max(s_range)], "k": "s..max_k",
                                "ell": "0..k-1"}, "pass", checked)


def _ell_k_search(k):
    """Smallest ell in [1, k-2] with the (r, s) = (2, 3) clique constraint, by exact rationals."""
    for ell in range(1, k - 1):
        total = Fraction(0)
        for j in (1, 2):
            total += math.comb(ell, 3 - j) * (math.comb(k - ell, j) - math.comb(2, j))
        lhs = (k - ell - 2) - Fraction(k - ell, math.comb(k, 3) - math.comb(ell, 3)) * total
        if lhs <= 0:
            return ell
    return k - 2


def check_ell_k_closed_form(max_k=500) -> ClaimResult:
    checked = 0
    for k in range(4, max_k + 1):
        by_search = _ell_k_search(k)
        by_quad = next(ell for ell in range(1, k) if ell * ell - (2 * k + 3) * ell + k * k - 3 * k + 2 <= 0)
        # ceil(k + 3/2 - sqrt(6k + 1/4)) = ceil((2k + 3 - sqrt(24k + 1)) / 2)
        root = math.isqrt(24 * k + 1)
        num = 2 * k + 3 - root
        if root * root != 24 * k + 1:
            num -= 1  # the true square root is strictly larger than isqrt
            closed = num // 2 + 1
        else:
            closed = -(-num // 2)
        checked += 1
        if not by_search == max(by_quad, 1) == closed:
            return ClaimResult("ell_k_closed_form", {"k": [4, max_k]}, "fail", checked,
                               {"k": k, "search": by_search, "quadratic": by_quad, "closed": closed})
    return ClaimResult("ell_k_closed_form", {"k": [4, max_k]}, "pass", checked)


def check_ell_k_gap_bound(max_k=500) -> ClaimResult:
    checked = 0
    for k in range(4, max_k + 1):
        ell = _ell_k_search(k)
        a = 1
        while 6 * (k - 1) >= a * (a + 5):
            checked += 1
            if ell > k - a:
                return ClaimResult("ell_k_gap_bound", {"k": [4, max_k]}, "fail", checked, {"k": k, "a": a, "ell": ell})
            a += 1
    return ClaimResult("ell_k_gap_bound", {"k": [4, max_k]}, "pass", checked)


def _components(edges):
    comps: list = []
    for e in edges:
        merged = [c for c in comps if c[0] & set(e)]
        verts, es = set(e), [e]
        for c in merged:
            verts |= c[0]
            es += c[1]
            comps.remove(c)
        comps.append((verts, es))
    return comps


def check_cycle_subgraph_in_path(max_v=12, s_range=range(2, 7)) -> ClaimResult:
    """Proper induced sub-hypergraphs of cycles embed in a shorter path, componentwise spanning."""
    checked = 0
    for s, ell, m, C in _cycle_grid(max_v, s_range):
        verts = C.vertices()
        path = MultiHypergraph(s, edges=tight_path_edges(m - 1, s, ell))
        seen = set()
        for size in range(s, len(verts)):
            for W in itertools.combinations(verts, size):
                sub = C.induced(W)
                if sub.num_edges == 0:
                    continue
                key = tuple(sorted(sub.edges))
                if key in seen:
                    continue
                seen.add(key)
                checked += 1
                F = MultiHypergraph(s, edges=sub.edge_list())
                if next(iter_embeddings(path, F), None) is None:
                    return ClaimResult("cycle_subgraph_in_path", {"max_v": max_v}, "fail", checked,
                                       {"m": m, "s": s, "ell": ell, "edges": [list(e) for e in key]})
                total = 0
                for cv, ces in _components(F.edge_list()):
                    mi = len(ces)
                    total += mi
                    P = MultiHypergraph(s, edges=tight_path_edges(mi, s, ell))
                    comp = MultiHypergraph(s, edges=ces)
                    if P.num_vertices != len(cv) or next(iter_embeddings(P, comp), None) is None:
                        return ClaimResult("cycle_subgraph_in_path", {"max_v": max_v}, "fail", checked,
                                           {"m": m, "s": s, "ell": ell, "component": [list(e) for e in ces]})
                if total >= m:
                    return ClaimResult("cycle_subgraph_in_path", {"max_v": max_v}, "fail", checked,
                                       {"m": m, "s": s, "ell": ell, "edges": [list(e) for e in key]})
    return ClaimResult("cycle_subgraph_in_path", {"max_v": max_v, "s": [min(s_range), max(s_range)]}, "pass", checked,
                       notes="each component is a spanning subgraph of a path; the union embeds in P_{m-1}")


DEFAULT_RANGES = {
    "edge_balanced_implies_balanced": {"ranges": [(2, 7), (3, 6)]},
    "path_cycle_degeneracy": {"max_v": 12},
    "path_cycle_mu": {"max_v": 12},
    "tight_cycle_edge_balanced": {"max_m": 12},
    "clique_edge_balanced": {"max_t": 9},
    "binomial_inequality": {"max_s": 30},
    "starplus_balanced": {"max_k": 9, "max_s": 5, "samples": 3},
    "falling_quotient_monotone": {"max_k": 40},
    "ell_k_closed_form": {"max_k": 500},
    "ell_k_gap_bound": {"max_k": 500},
    "cycle_subgraph_in_path": {"max_v": 12},
}

_CHECKS = {"edge_balanced_implies_balanced": check_edge_balanced_implies_balanced, "path_cycle_degeneracy": check_path_cycle_degeneracy, "path_cycle_mu": check_path_cycle_mu, "tight_cycle_edge_balanced": check_tight_cycle_edge_balanced, "clique_edge_balanced": check_clique_edge_balanced,
           "binomial_inequality": check_binomial_inequality, "starplus_balanced": check_starplus_balanced, "falling_quotient_monotone": check_falling_quotient_monotone, "ell_k_closed_form": check_ell_k_closed_form,
           "ell_k_gap_bound": check_ell_k_gap_bound, "cycle_subgraph_in_path": check_cycle_subgraph_in_path}


def verify_appendix(ranges: dict | None = None, claims: Iterable[str] | None = None) -> list[ClaimResult]:
    """Run every supporting-claim check (or the named subset) over its range."""
    ranges = {**DEFAULT_RANGES, **(ranges or {})}
    names = list(claims) if claims is not None else list(_CHECKS)
    unknown = [c for c in names if c not in _CHECKS]
    if unknown:
        raise ParameterError(f"unknown claims: {unknown}")
    return [_CHECKS[c](**ranges[c]) for c in names]
