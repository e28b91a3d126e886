"""Player strategies for the semi-random process.

Every strategy is a :class:`~semirandom.process.Strategy`: the engine calls
``start`` once, then ``respond(state, U)`` every round, then ``claim()`` to ask
whether a finished copy of the target exists (the engine re-verifies it).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import analysis
from .hypergraph import (MultiHypergraph, ParameterError, TargetSpec, build_target,
                         embeddings_through, min_cycle_length)
from .process import GameState, Strategy, StrategyContractError, waste


# ----------------------------------------------------------------- helpers

@dataclass
class PhaseClock:
    """Phase lengths measured in rounds; phase ``i`` covers rounds after the first ``t0+..+t_{i-1}``."""

    t0: int
    t1: int
    t2: int

    def __post_init__(self):
        if min(self.t0, self.t1, self.t2) < 0:
            raise ParameterError("phase lengths must be non-negative")

    @property
    def budget(self) -> int:
        return self.t0 + self.t1 + self.t2

    def phase(self, step: int) -> int:
        """Phase of the 1-based round ``step`` (3 once the budget is exhausted)."""
        if step <= self.t0:
            return 0
        if step <= self.t0 + self.t1:
            return 1
        if step <= self.budget:
            return 2
        return 3

    def offset(self, step: int) -> int:
        """1-based round index inside the current phase."""
        ph = self.phase(step)
        return step - (0, self.t0, self.t0 + self.t1, self.budget)[ph]


class FreshPool:
    """Hands out the smallest vertices of a pool never handed out or marked before."""

    def __init__(self, pool):
        self.pool = list(pool)
        self.used: set = set()
        self._pos = 0

    def mark(self, vertices):
        self.used.update(vertices)

    def take(self, count: int, avoid=(), reuse: bool = False) -> list:
        """``reuse=True`` falls back to already used vertices once the pool runs dry."""
        avoid = set(avoid)
        out = []
        i = self._pos
        while len(out) < count:
            if i >= len(self.pool):
                if not reuse:
                    raise StrategyContractError("vertex pool exhausted")
                rest = [v for v in self.pool if v not in avoid and v not in out]
                if len(rest) < count - len(out):
                    raise StrategyContractError("vertex pool exhausted")
                out.extend(rest[: count - len(out)])
                break
            v = self.pool[i]
            if v not in self.used and v not in avoid:
                out.append(v)
            i += 1
        while self._pos < len(self.pool) and self.pool[self._pos] in self.used:
            self._pos += 1
        self.used.update(out)
        return out


def _check_path_regime(m, s, ell, r):
    if not (1 <= r < s and m >= 1 and 1 <= ell):
        raise ParameterError(f"invalid parameters m={m}, s={s}, ell={ell}, r={r}")
    if 2 * ell > s:
        raise ParameterError(f"need ell <= s/2, got ell={ell}, s={s}")
    if s - r < ell:
        raise ParameterError(f"need s - r >= ell, got s={s}, r={r}, ell={ell}")


class PathGrower:
    """Grows an ell-tight path edge by edge from its tail.

    ``edges`` is the path in order; ``vertices`` its vertex set.
    """

    def __init__(self, s, ell, r, fresh: FreshPool):
        self.s, self.ell, self.r = s, ell, r
        self.fresh = fresh
        self.edges: list = []
        self.vertices: set = set()

    def end_free(self, head: bool) -> list:
        """Degree-one vertices of an end edge, sorted."""
        if not self.edges:
            return []
        if len(self.edges) == 1:
            return sorted(self.edges[0])
        e, nb = (self.edges[0], self.edges[1]) if head else (self.edges[-1], self.edges[-2])
        return sorted(set(e) - set(nb))

    def try_extend(self, U) -> tuple | None:
        """V extending the path by the edge U+V, or None when U touches the path."""
        if self.vertices & set(U):
            return None
        if not self.edges:
            V = tuple(self.fresh.take(self.s - self.r, avoid=U))
        else:
            V = tuple(self.end_free(head=False)[: self.ell]) + tuple(
                self.fresh.take(self.s - self.ell - self.r, avoid=U))
        self._add(tuple(U) + V)
        return V

    def _add(self, edge):
        edge = tuple(sorted(edge))
        self.edges.append(edge)
        self.vertices.update(edge)
        self.fresh.mark(edge)


# ------------------------------------------------------------ path / cycle

class PathBuilder(Strategy):
    """Extends a single ell-tight path whenever the drawn set avoids it."""

    name = "path_builder"

    def __init__(self, m, s, ell, r):
        _check_path_regime(m, s, ell, r)
        self.m, self.s, self.ell, self.r = m, s, ell, r

    def start(self, state, budget):
        super().start(state, budget)
        self.path = PathGrower(self.s, self.ell, self.r, FreshPool(range(1, state.n + 1)))

    def respond(self, state, U):
        if len(self.path.edges) < self.m:
            V = self.path.try_extend(U)
            if V is not None:
                return V
        return waste(state.n, U, self.s - self.r, self.path.vertices)

    def claim(self):
        return self.path.vertices if len(self.path.edges) >= self.m else None


class LooseCycleBuilder(Strategy):
    """Builds an (m-1)-edge path, then closes it with one edge (regime s-r >= 2 ell)."""

    name = "loose_cycle_builder"

    def __init__(self, m, s, ell, r):
        _check_path_regime(m, s, ell, r)
        if s - r < 2 * ell:
            raise ParameterError(f"loose_cycle_builder needs s - r >= 2 ell, got s-r={s - r}, ell={ell}")
        if m < max(2, min_cycle_length(s, ell)):
            raise ParameterError(f"cycle too short: m={m}")
        self.m, self.s, self.ell, self.r = m, s, ell, r

    def start(self, state, budget):
        super().start(state, budget)
        self.path = PathGrower(self.s, self.ell, self.r, FreshPool(range(1, state.n + 1)))
        self.closed = False

    def respond(self, state, U):
        p = self.path
        if not self.closed and len(p.edges) < self.m - 1:
            V = p.try_extend(U)
            if V is not None:
                return V
        elif not self.closed and not (p.vertices & set(U)):
            if len(p.edges) == 1:
                ends = p.end_free(head=True)[: 2 * self.ell]
            else:
                ends = p.end_free(head=True)[: self.ell] + p.end_free(head=False)[: self.ell]
            V = tuple(ends) + tuple(p.fresh.take(self.s - 2 * self.ell - self.r, avoid=U))
            p._add(tuple(U) + V)
            self.closed = True
            return V
        return waste(state.n, U, self.s - self.r, p.vertices)

    def claim(self):
        return self.path.vertices if self.closed else None


class _CycleBase(Strategy):
    """Shared Phase 0 (an (m-3)-edge path) and the choice of the attachment sets."""

    def __init__(self, m, s, ell, r, phase1_fraction=None):
        _check_path_regime(m, s, ell, r)
        if m < 3:
            raise ParameterError("cycle strategies need m >= 3")
        self.m, self.s, self.ell, self.r = m, s, ell, r
        self.phase1_fraction = phase1_fraction

    def _clock(self, budget):
        t0 = min(self.m - 3, budget)
        rest = budget - t0
        if self.phase1_fraction is None:
            t1 = max(0, (budget - self.m + 3) // 2)
        else:
            t1 = int(rest * self.phase1_fraction)
        return PhaseClock(t0, t1, rest - t1)

    def start(self, state, budget):
        super().start(state, budget)
        self.n = state.n
        self.clock = self._clock(budget)
        self.fresh = FreshPool(range(1, state.n + 1))
        self.path = PathGrower(self.s, self.ell, self.r, self.fresh)
        self.t = 0
        self.failed = False
        self.done = None
        self.L1 = self.L2 = None
        if self.m == 3:
            L = list(range(state.n - self.ell + 1, state.n + 1))
            self.fresh.mark(L)
            self.L1 = self.L2 = tuple(L)
            self.core = set(L)
        self._phase1_ready = self.m == 3

    def _enter_phase1(self):
        p = self.path
        if len(p.edges) < self.m - 3:
            self.failed = True
            return
        if self.m == 4:
            e1 = sorted(p.edges[0])
            self.L1, self.L2 = tuple(e1[: self.ell]), tuple(e1[self.ell: 2 * self.ell])
        elif self.m > 4:
            self.L1 = tuple(p.end_free(head=True)[: self.ell])
            self.L2 = tuple(p.end_free(head=False)[: self.ell])
        if self.m > 3:
            self.core = set(p.vertices)
        self._phase1_ready = True
        self._setup_phase1()

    def respond(self, state, U):
        self.t += 1
        ph = self.clock.phase(self.t)
        if ph == 0:
            if len(self.path.edges) < self.m - 3:
                V = self.path.try_extend(U)
                if V is not None:
                    return V
            return self._waste(U)
        if not self._phase1_ready and not self.failed:
            self._enter_phase1()
        elif self.m == 3 and not getattr(self, "_setup_done", False):
            self._setup_phase1()
        if self.failed or self.done is not None or ph == 3:
            return self._waste(U)
        V = self._phase1(U) if ph == 1 else self._phase2(U)
        return V if V is not None else self._waste(U)

    def _setup_phase1(self):
        self._setup_done = True

    def _waste(self, U):
        return waste(self.n, U, self.s - self.r)

    def claim(self):
        return self.done


class CycleThreePhase(_CycleBase):
    """Cycle strategy for the regime s - r = 2 ell - 1."""

    name = "cycle_three_phase"

    def __init__(self, m, s, ell, r, phase1_fraction=None):
        super().__init__(m, s, ell, r, phase1_fraction)
        if s - r != 2 * ell - 1:
            raise ParameterError(f"cycle_three_phase needs s - r = 2 ell - 1, got s-r={s - r}, ell={ell}")

    def _setup_phase1(self):
        super()._setup_phase1()
        self.cap = self.clock.t1 // 3
        self.E1: list = []
        self.E2: list = []
        self.owner1: dict = {}  # vertex of e' minus L' -> index into E1
        self.taken: set = set(self.core)

    def _phase1(self, U):
        if self.taken & set(U):
            return None
        odd = self.clock.offset(self.t) % 2 == 1
        target, L = (self.E1, self.L1) if odd else (self.E2, self.L2)
        if len(target) >= self.cap:
            return None
        V = tuple(L) + tuple(self.fresh.take(self.ell - 1, avoid=U))
        edge = tuple(sorted(tuple(U) + V))
        target.append(edge)
        if odd:
            for v in set(edge) - set(self.L1):
                self.owner1[v] = len(self.E1) - 1
        self.taken.update(edge)
        self.fresh.mark(edge)
        return V

    def _phase2(self, U):
        Us = set(U)
        if Us & self.core:
            return None
        for u in sorted(Us):
            i = self.owner1.get(u)
            if i is None:
                continue
            e1 = self.E1[i]
            if len(Us & set(e1)) != 1:
                continue
            for e2 in self.E2:
                if e2 != e1 and not (Us & set(e2)):
                    A = [v for v in e1 if v not in self.L1 and v not in Us][: self.ell - 1]
                    B = [v for v in e2 if v not in self.L2][: self.ell]
                    V = tuple(A) + tuple(B)
                    self.done = set(self.core) | set(e1) | set(e2) | Us | set(V)
                    return V
        return None


class CycleGeneralX(_CycleBase):
    """Cycle strategy for 2 <= x <= min(r, ell) with x = 2 ell - (s - r)."""

    name = "cycle_general_x"

    def __init__(self, m, s, ell, r, phase1_fraction=None):
        super().__init__(m, s, ell, r, phase1_fraction)
        self.x = 2 * ell - (s - r)
        if not 2 <= self.x <= min(r, ell):
            raise ParameterError(f"cycle_general_x needs 2 <= x <= min(r, ell), got x={self.x}")
        self.q1, self.q2 = self.x // 2, (self.x + 1) // 2

    def _setup_phase1(self):
        super()._setup_phase1()
        rest = [v for v in range(1, self.n + 1) if v not in self.core]
        third = math.ceil(len(rest) / 3)
        self.W = [set(rest[:third]), set(rest[third:2 * third]), set(rest[2 * third:])]
        self.pools = [FreshPool(rest[:third]), FreshPool(rest[third:2 * third])]
        self.E = [[], []]
        self.index = [{}, {}]  # q-subset of e minus L -> edge indices
        self.overloaded = 0

    def _phase1(self, U):
        Us = set(U)
        for side, L, q in ((0, self.L1, self.q1), (1, self.L2, self.q2)):
            if Us <= self.W[side]:
                pool = self.pools[side]
                pool.mark(U)
                V = tuple(L) + tuple(pool.take(self.ell - self.x, avoid=U, reuse=True))
                edge = tuple(sorted(tuple(U) + V))
                self.E[side].append(edge)
                inner = [v for v in edge if v not in L]
                for Q in itertools.combinations(inner, q):
                    lst = self.index[side].setdefault(Q, [])
                    lst.append(len(self.E[side]) - 1)
                    if len(lst) == 4:
                        self.overloaded += 1
                return V
        return None

    def _phase2(self, U):
        Us = set(U)
        A = tuple(sorted(Us & self.W[0]))
        B = tuple(sorted(Us & self.W[1]))
        if len(A) != self.q1 or len(B) != self.q2 or len(Us & self.W[2]) != self.r - self.x:
            return None
        cand1 = self.index[0].get(A)
        cand2 = self.index[1].get(B)
        if not cand1 or not cand2:
            return None
        e1, e2 = self.E[0][cand1[0]], self.E[1][cand2[0]]
        P = [v for v in e1 if v not in self.L1 and v not in Us][: self.ell - self.q1]
        Q = [v for v in e2 if v not in self.L2 and v not in Us][: self.ell - self.q2]
        V = tuple(P) + tuple(Q)
        self.done = set(self.core) | set(e1) | set(e2) | Us | set(V)
        return V


# ----------------------------------------------------------------- starplus

@dataclass
class CollectedCopy:
    vertices: frozenset
    edges: list
    embedding: dict
    pending: dict = field(default_factory=dict)  # r-set -> list of s-edges still to place
    placed: int = 0


class FlowerLedger:
    """Collected copies of a Phase-1 pattern, pairwise sharing fewer than ``r`` vertices outside a root set."""

    def __init__(self, r: int, roots=()):
        self.r = r
        self.roots = frozenset(roots)
        self.copies: list[CollectedCopy] = []
        self.by_rset: dict = {}
        self._vertex_owner: dict = {}

    def compatible(self, vertices) -> bool:
        seen: dict = {}
        for v in set(vertices) - self.roots:
            for i in self._vertex_owner.get(v, ()):
                seen[i] = seen.get(i, 0) + 1
                if seen[i] >= self.r:
                    return False
        return True

    def add(self, vertices, edges, embedding, pending: dict) -> int:
        if not self.compatible(vertices):
            raise StrategyContractError("ledger insertion would break the sharing rule")
        idx = len(self.copies)
        self.copies.append(CollectedCopy(frozenset(vertices), list(edges), dict(embedding),
                                         {k: list(v) for k, v in pending.items()}))
        for v in set(vertices) - self.roots:
            self._vertex_owner.setdefault(v, []).append(idx)
        for rset in pending:
            self.by_rset.setdefault(rset, []).append(idx)
        return idx

    def match(self, U) -> tuple | None:
        """(copy index, s-edge) for the first copy with an unplaced edge keyed by ``U``."""
        for idx in self.by_rset.get(tuple(U), ()):
            lst = self.copies[idx].pending.get(tuple(U))
            if lst:
                return idx, lst[0]
        return None

    def place(self, idx: int, U):
        c = self.copies[idx]
        c.pending[tuple(U)].pop(0)
        c.placed += 1
        return all(not v for v in c.pending.values())

    def check_invariants(self) -> bool:
        """Pairwise: fewer than r shared non-root vertices and no shared edge."""
        for a, b in itertools.combinations(self.copies, 2):
            if len((a.vertices & b.vertices) - self.roots) >= self.r:
                return False
            if set(a.edges) & set(b.edges):
                return False
        return True


def _template(cap_edges, exclude, r):
    """For each cap edge, an r-subset avoiding ``exclude``: lexicographically first one not yet used."""
    used: set = set()
    out = []
    for h in cap_edges:
        options = list(itertools.combinations(sorted(v for v in h if v not in exclude), r))
        if not options:
            raise ParameterError(f"cap edge {h} has fewer than r vertices outside the center")
        choice = next((T for T in options if T not in used), options[0])
        used.add(choice)
        out.append((h, choice))
    return out


class StarplusBuilder(Strategy):
    """Two-phase strategy for an (s, s-r)-starplus target."""

    name = "starplus_builder"

    def __init__(self, target: MultiHypergraph, r: int, decomposition=None, phase1_fraction=None,
                 log_split: bool = True):
        s = target.s
        c = s - r
        if decomposition is None:
            decomposition = self._find_decomposition(target, r)
        dec = decomposition
        if dec is None or dec.c != c:
            raise ParameterError(f"no decomposition with center size {c}")
        if dec.condition14 == analysis.VIOLATED:
            raise ParameterError("the starplus decomposition violates the ray/cap balance condition")
        if not dec.flower_edge_balanced:
            raise ParameterError("the flower of the decomposition is not edge-balanced")
        outside = set(target.vertices()) - set(dec.center)
        if set(dec.flower.vertices()) != outside:
            raise ParameterError("the flower must span every non-center vertex")
        self.H, self.r, self.s, self.dec = target, r, s, dec
        self.phase1_fraction = phase1_fraction
        self.log_split = log_split
        self.template = _template(dec.cap.edge_list(), set(dec.center), r)
        self._plans: dict = {}

    @staticmethod
    def _find_decomposition(H, r):
        """Lexicographically first center of size s-r giving a usable decomposition."""
        c = H.s - r
        for C in itertools.combinations(H.vertices(), c):
            d = analysis._decompose_at(H, C)
            if d is None or d.condition14 == analysis.VIOLATED or not d.flower_edge_balanced:
                continue
            if set(d.flower.vertices()) == set(H.vertices()) - set(C):
                return d
        return None

    def _clock(self, n, budget):
        dec = self.dec
        if dec.lam2 == 0:
            return PhaseClock(0, budget, 0)
        if self.phase1_fraction is not None:
            t1 = int(budget * self.phase1_fraction)
        elif dec.condition14 == analysis.STRICT or not self.log_split:
            t1 = budget // 2
        else:
            t1 = budget // max(2, math.ceil(math.log(n)))
        return PhaseClock(0, t1, budget - t1)

    def start(self, state, budget):
        super().start(state, budget)
        self.n = state.n
        self.clock = self._clock(state.n, budget)
        self.C = tuple(range(1, self.s - self.r + 1))
        self.center_map = dict(zip(self.dec.center, self.C))
        self.R = MultiHypergraph(self.r, state.n)
        self.ledger = FlowerLedger(self.r)
        self.t = 0
        self.done = None

    def respond(self, state, U):
        self.t += 1
        ph = self.clock.phase(self.t)
        if self.done is None:
            if ph == 1 and not set(U) & set(self.C):
                fresh = U not in self.R
                self.R.add(U)
                if fresh:
                    self._collect(U)
                return self.C
            if ph == 2:
                hit = self.ledger.match(U)
                if hit is not None:
                    idx, edge = hit
                    if self.ledger.place(idx, U):
                        self.done = set(self.ledger.copies[idx].vertices) | set(self.C)
                    return tuple(v for v in edge if v not in U)
        return waste(state.n, U, self.s - self.r, self.C)

    def _collect(self, U):
        for emb in embeddings_through(self.R, self.dec.flower, U, plans=self._plans):
            verts = set(emb.values())
            if not self.ledger.compatible(verts):
                continue
            full = dict(emb)
            full.update(self.center_map)
            edges = [tuple(sorted(full[v] for v in e)) for e in self.dec.flower.edge_list()]
            pending: dict = {}
            for h, T in self.template:
                key = tuple(sorted(full[v] for v in T))
                pending.setdefault(key, []).append(tuple(sorted(full[v] for v in h)))
            self.ledger.add(verts, edges, full, pending)
            if self.dec.lam2 == 0:
                self.done = verts | set(self.C)
            return

    def claim(self):
        return self.done


# ------------------------------------------------------------------ cliques

class CliqueBuilder(Strategy):
    """Recursive three-phase strategy for the s-uniform clique on k vertices."""

    name = "clique_builder"

    def __init__(self, k, s, r, phase0_fraction=0.1, phase1_fraction=0.5):
        if not 2 <= r < s <= k:
            raise ParameterError(f"need 2 <= r < s <= k, got r={r}, s={s}, k={k}")
        self.k, self.s, self.r = k, s, r
        self.phase0_fraction, self.phase1_fraction = phase0_fraction, phase1_fraction
        if k == s:
            return
        ell = analysis.ell_k(r, s, k)
        self.ell, self.h = ell, k - ell
        self.j0 = max(1, s - ell)
        # assignment maps: label sets are 1..ell, S_T lists keep lexicographic order
        self.S_of: dict = {}
        for j in range(self.j0, r + 1):
            for S in itertools.combinations(range(1, ell + 1), s - j):
                self.S_of.setdefault(S[: r - j], []).append(S)
        self.m_T = {T: len(v) for T, v in self.S_of.items()}
        self.eta1 = sum(math.comb(self.h, j) * math.comb(ell, s - j) for j in range(1, r + 1))
        self.eta2 = sum(math.comb(self.h, j) * math.comb(ell, s - j) for j in range(r + 1, s + 1))
        self.phase2_template = self._phase2_template()
        self.inner = CliqueBuilder(ell, s, r, phase0_fraction, phase1_fraction) if ell >= s else None

    def multiplicity_sums(self) -> dict:
        """j -> total multiplicity over (r-j)-subsets of the root set."""
        out: dict = {}
        for T, m in self.m_T.items():
            out[self.r - len(T)] = out.get(self.r - len(T), 0) + m
        return out

    def _phase2_template(self):
        """(edge, key) pairs: edge = (root labels, outside positions); key = r outside positions."""
        h, r = self.h, self.r
        counts: dict = {}
        out = []
        for j in range(r + 1, self.s + 1):
            for roots in itertools.combinations(range(1, self.ell + 1), self.s - j):
                for pos in itertools.combinations(range(h), j):
                    key = None
                    for a in pos:
                        arc = [(a + i) % h for i in range(j)]
                        if set(arc) == set(pos):
                            cand = tuple(sorted(arc[:r]))
                            if counts.get(cand, 0) == 0:
                                key = cand
                            break
                    if key is None:
                        opts = list(itertools.combinations(pos, r))
                        key = min(opts, key=lambda T: (counts.get(T, 0), T))
                    counts[key] = counts.get(key, 0) + 1
                    out.append(((roots, pos), key))
        return out

    def start(self, state, budget):
        super().start(state, budget)
        self.n = state.n
        self.t = 0
        self.done = None
        if self.k == self.s:
            self.clock = PhaseClock(0, budget, 0)
            return
        if self.inner is not None:
            t0 = min(budget, math.ceil(self.phase0_fraction * budget))
            self.inner.start(state, t0)
            self.L = None
        else:
            t0 = 0
            self.L = tuple(range(state.n - self.ell + 1, state.n + 1))
        rest = budget - t0
        t1 = rest if self.eta2 == 0 else int(rest * self.phase1_fraction)
        self.clock = PhaseClock(t0, t1, rest - t1)
        self.hits: dict = {}
        self.complete: set = set()
        self.top_by_vertex: dict = {}
        self.ext: dict = {}
        self.ledger = FlowerLedger(self.r)
        self.seen_copies: set = set()
        self.failed = False

    def _setup_roots(self):
        claim = self.inner.claim()
        if claim is None:
            self.failed = True
            return
        self.L = tuple(sorted(claim))
        self.ledger.roots = frozenset(self.L)

    def _waste(self, U):
        return waste(self.n, U, self.s - self.r, self.L or ())

    def respond(self, state, U):
        self.t += 1
        if self.k == self.s:
            if self.done is None:
                V = waste(self.n, U, self.s - self.r)
                self.done = set(U) | set(V)
                return V
            return waste(self.n, U, self.s - self.r)
        ph = self.clock.phase(self.t)
        if ph == 0:
            return self.inner.respond(state, U)
        if self.L is None and not self.failed:
            self._setup_roots()
        if self.failed or self.done is not None:
            return self._waste(U)
        if ph == 1:
            V = self._phase1(U)
        elif ph == 2:
            V = self._phase2(U)
        else:
            V = None
        return V if V is not None else self._waste(U)

    # Phase 1 -----------------------------------------------------------
    def _phase1(self, U):
        Lset = set(self.L)
        label = {v: i + 1 for i, v in enumerate(self.L)}
        A = tuple(v for v in U if v not in Lset)
        T = tuple(label[v] for v in U if v in Lset)
        if len(A) < self.j0:
            return None
        mT = self.m_T.get(T, 0)
        cnt = self.hits.get(U, 0) + 1
        self.hits[U] = cnt
        if cnt > mT:
            return None
        S = self.S_of[T][cnt - 1]
        V = tuple(self.L[i - 1] for i in S if i not in T)
        if cnt == mT and self._is_complete(A):
            self._mark_complete(A)
        return V

    def _is_complete(self, A) -> bool:
        j = len(A)
        for T in itertools.combinations(range(1, self.ell + 1), self.r - j):
            need = self.m_T.get(T, 0)
            if need == 0:
                continue
            U = tuple(sorted(A + tuple(self.L[i - 1] for i in T)))
            if self.hits.get(U, 0) < need:
                return False
        return True

    def _mark_complete(self, A):
        if A in self.complete:
            return
        self.complete.add(A)
        if len(A) == self.r:
            for v in A:
                self.top_by_vertex.setdefault(v, set()).add(A)
            for i in range(self.r):
                Q = A[:i] + A[i + 1:]
                self.ext.setdefault(Q, set()).add(A[i])
        for X in self._copies_through(A):
            if X in self.seen_copies:
                continue
            self.seen_copies.add(X)
            if self.ledger.compatible(X):
                self._accept(X)
                if self.done is not None:
                    return

    def _ok_with(self, X, w) -> bool:
        for size in range(max(self.j0, 1), self.r + 1):
            for rest in itertools.combinations(X, size - 1):
                if tuple(sorted(rest + (w,))) not in self.complete:
                    return False
        return True

    def _copies_through(self, A):
        """All h-sets of outside vertices containing A whose subsets of sizes j0..r are complete."""
        r, h = self.r, self.h
        for size in range(self.j0, len(A) + 1):
            for sub in itertools.combinations(A, size):
                if sub not in self.complete:
                    return []
        found = []

        def cands(X):
            if len(X) >= r - 1:
                return self.ext.get(tuple(sorted(X))[: r - 1], set())
            out = set()
            for e in self.top_by_vertex.get(X[0], ()):
                out.update(e)
            return out

        def grow(X, last):
            if len(X) == h:
                found.append(tuple(sorted(X)))
                return
            for w in sorted(cands(X)):
                if w in X or w <= last:
                    continue
                if self._ok_with(X, w):
                    grow(X + (w,), w)

        grow(tuple(A), 0)
        return found

    def _accept(self, X):
        pos = {i: v for i, v in enumerate(X)}
        edges = []
        for j in range(self.j0, self.r + 1):
            for roots in itertools.combinations(self.L, self.s - j):
                for sub in itertools.combinations(X, j):
                    edges.append(tuple(sorted(roots + sub)))
        pending: dict = {}
        for (roots, ps), key in self.phase2_template:
            edge = tuple(sorted(tuple(self.L[i - 1] for i in roots) + tuple(pos[p] for p in ps)))
            pending.setdefault(tuple(sorted(pos[p] for p in key)), []).append(edge)
        self.ledger.add(X, edges, pos, pending)
        if self.eta2 == 0:
            self.done = set(X) | set(self.L)

    # Phase 2 -----------------------------------------------------------
    def _phase2(self, U):
        hit = self.ledger.match(U)
        if hit is None:
            return None
        idx, edge = hit
        if self.ledger.place(idx, U):
            self.done = set(self.ledger.copies[idx].vertices) | set(self.L)
        return tuple(v for v in edge if v not in U)

    def claim(self):
        return self.done


# ----------------------------------------------------------------- baseline

class BaselineRandom(Strategy):
    """Uniform V among (s-r)-subsets avoiding U; success found by the engine's per-step search."""

    name = "baseline_random"
    check_every = 1

    def respond(self, state: GameState, U):
        rng = state.rng
        k = state.s - state.r
        Us = sorted(U)
        out: set = set()
        while len(out) < k:
            v = int(rng.integers(0, state.n - len(Us))) + 1
            for u in Us:
                if v >= u:
                    v += 1
            out.add(v)
        return tuple(sorted(out))


# ----------------------------------------------------------------- registry

STRATEGIES = ("path_builder", "loose_cycle_builder", "cycle_three_phase", "cycle_general_x",
              "starplus_builder", "clique_builder", "baseline_random", "lex_smallest")


def _ell_params(target: TargetSpec):
    return target.params["m"], target.params["s"], target.get("ell", target.params["s"] - 1)


def make_strategy(name: str, target: TargetSpec, r: int, **params) -> Strategy:
    """Instantiate a strategy by its identifier for the given target and r."""
    from .process import LexSmallest

    if name in ("path_builder", "loose_cycle_builder", "cycle_three_phase", "cycle_general_x"):
        if target.family not in ("tight_path", "tight_cycle"):
            raise ParameterError(f"{name} needs a path or cycle target")
        m, s, ell = _ell_params(target)
        cls = {"path_builder": PathBuilder, "loose_cycle_builder": LooseCycleBuilder,
               "cycle_three_phase": CycleThreePhase, "cycle_general_x": CycleGeneralX}[name]
        return cls(m, s, ell, r, **params)
    if name == "starplus_builder":
        return StarplusBuilder(build_target(target), r, **params)
    if name == "clique_builder":
        if target.family != "clique":
            raise ParameterError("clique_builder needs a clique target")
        k = params.pop("k", target.params["k"])
        return CliqueBuilder(k, target.params["s"], r, **params)
    if name == "baseline_random":
        return BaselineRandom()
    if name == "lex_smallest":
        return LexSmallest()
    raise ParameterError(f"unknown strategy {name!r}; known: {', '.join(STRATEGIES)}")


def exponent_of(target: TargetSpec, r: int) -> Fraction:
    """Best known upper exponent for the target (used to scale budgets)."""
    rep = analysis.threshold_report(build_target(target), r)
    up = rep.best_upper
    return up if up is not None else Fraction(r)
