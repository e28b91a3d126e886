"""Uniform multi-hypergraphs, target-family generators and containment search."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Edge = tuple  # sorted tuple of distinct positive ints


class ResourceError(RuntimeError):
    """A requested computation exceeds the configured size limits."""


class ParameterError(ValueError):
    """Raised when an input violates a documented invariant."""


def make_edge(vertices: Iterable[int]) -> Edge:
    e = tuple(sorted(vertices))
    if len(set(e)) != len(e):
        raise ParameterError(f"edge has repeated vertices: {e}")
    return e


class MultiHypergraph:
    """An s-uniform hypergraph on [n] whose edges carry multiplicities.

    ``n`` may be ``None`` for target objects; it then tracks the largest vertex.
    """

    __slots__ = ("s", "_n", "edges", "_total", "_incidence")

    def __init__(self, s: int, n: int | None = None, edges: Iterable[Iterable[int]] = ()):
        if s < 1:
            raise ParameterError("uniformity s must be positive")
        self.s = s
        self._n = n
        self.edges: dict[Edge, int] = {}
        self._total = 0
        self._incidence: dict[int, set] = {}
        for e in edges:
            self.add(e)

    @property
    def n(self) -> int:
        if self._n is not None:
            return self._n
        return max(self._incidence, default=0)

    def add(self, vertices: Iterable[int], mult: int = 1) -> Edge:
        e = make_edge(vertices)
        if len(e) != self.s:
            raise ParameterError(f"edge {e} does not have size s={self.s}")
        if e[0] < 1 or (self._n is not None and e[-1] > self._n):
            raise ParameterError(f"edge {e} leaves the vertex range")
        if mult < 1:
            raise ParameterError("multiplicity must be positive")
        if e not in self.edges:
            self.edges[e] = 0
            for v in e:
                self._incidence.setdefault(v, set()).add(e)
        self.edges[e] += mult
        self._total += mult
        return e

    def __contains__(self, e) -> bool:
        return tuple(e) in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def num_edges(self) -> int:
        """Edge count with multiplicity."""
        return self._total

    def vertices(self) -> list[int]:
        return sorted(self._incidence)

    @property
    def num_vertices(self) -> int:
        return len(self._incidence)

    def incident(self, v: int) -> set:
        return self._incidence.get(v, set())

    def degree(self, v: int) -> int:
        return sum(self.edges[e] for e in self.incident(v))

    def is_simple(self) -> bool:
        return all(m == 1 for m in self.edges.values())

    def edge_list(self) -> list[Edge]:
        return sorted(self.edges)

    def induced(self, vertex_set: Iterable[int]) -> "MultiHypergraph":
        vs = set(vertex_set)
        h = MultiHypergraph(self.s)
        for e, m in self.edges.items():
            if vs.issuperset(e):
                h.add(e, m)
        return h

    def relabeled(self, mapping: dict) -> "MultiHypergraph":
        h = MultiHypergraph(self.s)
        for e, m in self.edges.items():
            h.add((mapping[v] for v in e), m)
        return h

    def canonical(self) -> "MultiHypergraph":
        """Relabel vertices to 1..v in increasing order."""
        return self.relabeled({v: i + 1 for i, v in enumerate(self.vertices())})

    def copy(self) -> "MultiHypergraph":
        h = MultiHypergraph(self.s, self._n)
        for e, m in self.edges.items():
            h.add(e, m)
        return h

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiHypergraph) and self.s == other.s and self.edges == other.edges

    def __repr__(self) -> str:
        return f"MultiHypergraph(s={self.s}, v={self.num_vertices}, e={self.num_edges})"


# ---------------------------------------------------------------- targets

FAMILIES = ("tight_path", "tight_cycle", "clique", "full_starplus", "starplus", "wheel", "custom")

_FIELDS = {
    "tight_path": {"m", "s", "ell"},
    "tight_cycle": {"m", "s", "ell"},
    "clique": {"k", "s"},
    "full_starplus": {"k", "s", "c", "cap"},
    "starplus": {"c", "rays", "cap", "center"},
    "wheel": {"k", "s", "c"},
    "custom": {"s", "edges"},
}
_OPTIONAL = {"tight_path": {"ell"}, "tight_cycle": {"ell"}, "starplus": {"center"},
             "full_starplus": {"cap"}}


@dataclass(frozen=True)
class TargetSpec:
    """Symbolic description of a target hypergraph family member."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown target family {self.family!r}")
        allowed = _FIELDS[self.family]
        extra = set(self.params) - allowed
        if extra:
            raise ParameterError(f"unknown field(s) for {self.family}: {sorted(extra)}")
        missing = allowed - _OPTIONAL.get(self.family, set()) - set(self.params)
        if missing:
            raise ParameterError(f"missing field(s) for {self.family}: {sorted(missing)}")

    @classmethod
    def from_dict(cls, d: dict) -> "TargetSpec":
        d = dict(d)
        if "family" not in d:
            raise ParameterError("target is missing field 'family'")
        fam = d.pop("family")
        return cls(fam, d)

    @classmethod
    def from_json(cls, text: str) -> "TargetSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParameterError(f"target is not valid JSON: {exc}") from exc

    def to_dict(self) -> dict:
        out = {"family": self.family}
        for k in sorted(self.params):
            v = self.params[k]
            out[k] = [list(x) for x in v] if k in ("rays", "cap", "edges") else v
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def get(self, key, default=None):
        return self.params.get(key, default)

    # convenience constructors
    @classmethod
    def tight_path(cls, m, s, ell=None):
        return cls("tight_path", {"m": m, "s": s, "ell": s - 1 if ell is None else ell})

    @classmethod
    def tight_cycle(cls, m, s, ell=None):
        return cls("tight_cycle", {"m": m, "s": s, "ell": s - 1 if ell is None else ell})

    @classmethod
    def clique(cls, k, s):
        return cls("clique", {"k": k, "s": s})

    @classmethod
    def wheel(cls, k, s, c):
        return cls("wheel", {"k": k, "s": s, "c": c})

    @classmethod
    def custom(cls, s, edges):
        return cls("custom", {"s": s, "edges": [list(e) for e in edges]})


def _int(spec: TargetSpec, key: str, lo: int = 1) -> int:
    v = spec.params.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < lo:
        raise ParameterError(f"field {key!r} must be an integer >= {lo}, got {v!r}")
    return v


def _ell_segments(m: int, s: int, ell: int, cyclic: bool) -> list[Edge]:
    step = s - ell
    nv = step * m if cyclic else step * m + ell
    edges = []
    for i in range(m):
        base = i * step
        edges.append(make_edge(((base + j) % nv) + 1 for j in range(s)))
    return edges


def tight_path_edges(m: int, s: int, ell: int) -> list[Edge]:
    return _ell_segments(m, s, ell, cyclic=False)


def tight_cycle_edges(m: int, s: int, ell: int) -> list[Edge]:
    return _ell_segments(m, s, ell, cyclic=True)


def min_cycle_length(s: int, ell: int) -> int:
    return (s + 1) // (s - ell)


def build_target(spec: TargetSpec | dict) -> MultiHypergraph:
    """Canonical simple copy of a target on vertices 1..v_H."""
    if isinstance(spec, dict):
        spec = TargetSpec.from_dict(spec)
    fam = spec.family
    if fam in ("tight_path", "tight_cycle"):
        m, s = _int(spec, "m"), _int(spec, "s", 2)
        ell = spec.params.get("ell", s - 1)
        if not isinstance(ell, int) or not 1 <= ell < s:
            raise ParameterError(f"need 1 <= ell < s, got ell={ell}, s={s}")
        if fam == "tight_path":
            edges = tight_path_edges(m, s, ell)
        else:
            if m < min_cycle_length(s, ell) or (s - ell) * m < s:
                raise ParameterError(
                    f"cycle too short: m={m} < floor((s+1)/(s-ell))={min_cycle_length(s, ell)}")
            edges = tight_cycle_edges(m, s, ell)
            if len(set(edges)) != m:
                raise ParameterError(f"cycle too short: m={m} yields repeated edges")
        return MultiHypergraph(s, edges=edges)
    if fam == "clique":
        k, s = _int(spec, "k"), _int(spec, "s")
        if k < s:
            raise ParameterError(f"clique needs k >= s, got k={k}, s={s}")
        return MultiHypergraph(s, edges=itertools.combinations(range(1, k + 1), s))
    if fam == "full_starplus":
        k, s, c = _int(spec, "k"), _int(spec, "s", 2), _int(spec, "c")
        if not c < s <= k:
            raise ParameterError(f"need c < s <= k, got c={c}, s={s}, k={k}")
        center = tuple(range(1, c + 1))
        rays = [center + S for S in itertools.combinations(range(c + 1, k + 1), s - c)]
        return _starplus(s, center, rays, spec.params.get("cap", []), k)
    if fam == "starplus":
        c = _int(spec, "c")
        rays = [make_edge(e) for e in spec.params["rays"]]
        if not rays:
            raise ParameterError("starplus needs at least one ray")
        s = len(rays[0])
        center = tuple(spec.params.get("center") or range(1, c + 1))
        if len(center) != c:
            raise ParameterError("center size does not match c")
        for e in rays:
            if not set(center) <= set(e):
                raise ParameterError(f"ray {e} does not contain the center {center}")
        return _starplus(s, center, rays, spec.params["cap"], None)
    if fam == "wheel":
        k, s, c = _int(spec, "k"), _int(spec, "s", 2), _int(spec, "c")
        r = s - c
        if r < 2 or k - c < s + 1:
            raise ParameterError(f"wheel needs s-c >= 2 and k-c >= s+1, got k={k}, s={s}, c={c}")
        nrim = k - c
        center = tuple(range(1, c + 1))
        rim = [tuple(v + c for v in e) for e in tight_cycle_edges(nrim, r, r - 1)]
        cap = [tuple(v + c for v in e) for e in tight_cycle_edges(nrim, s, s - 1)]
        return _starplus(s, center, [center + e for e in rim], cap, k)
    # custom
    s = _int(spec, "s")
    edges = [make_edge(e) for e in spec.params["edges"]]
    if len(set(edges)) != len(edges):
        raise ParameterError("custom target has repeated edges; targets must be simple")
    return MultiHypergraph(s, edges=edges)


def _starplus(s, center, rays, cap, k) -> MultiHypergraph:
    h = MultiHypergraph(s)
    cset = set(center)
    for e in rays:
        h.add(e)
    for e in cap:
        e = make_edge(e)
        if cset <= set(e):
            raise ParameterError(f"cap edge {e} contains the center {tuple(center)}")
        if e in h:
            raise ParameterError(f"cap edge {e} duplicates an existing edge")
        h.add(e)
    if k is not None and h.vertices() and h.vertices()[-1] > k:
        raise ParameterError("cap uses vertices beyond k")
    return h


FANO_PLANE = [(1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)]


# ------------------------------------------------------ rooted multigraphs

@dataclass
class RootedMultigraph:
    """Multi-r-graph on root vertices plus ``h`` free vertices.

    Vertices are labelled: roots by the entries of ``roots``; free vertices
    by ``("x", i)`` for ``i`` in ``range(h)``.
    """

    r: int
    roots: list
    h: int
    required: dict  # r-set (tuple) -> multiplicity

    def __post_init__(self):
        allowed = set(self.roots) | {("x", i) for i in range(self.h)}
        for key, m in self.required.items():
            if len(key) != self.r or not set(key) <= allowed:
                raise ParameterError(f"required r-set {key} not within roots and free vertices")
            if m < 1:
                raise ParameterError("multiplicities must be positive")

    @property
    def total(self) -> int:
        return sum(self.required.values())


def double_clique_plus_root(root=0) -> RootedMultigraph:
    """2K_4 with one root joined once to each of its four vertices (r=2)."""
    xs = [("x", i) for i in range(4)]
    req = {}
    for a, b in itertools.combinations(xs, 2):
        req[(a, b)] = 2
    for a in xs:
        req[(root, a)] = 1
    return RootedMultigraph(2, [root], 4, req)


# ------------------------------------------------------------- containment

def delta_d(H: MultiHypergraph, d: int) -> int:
    """Maximum number of edges (with multiplicity) containing a common d-set."""
    if not 1 <= d <= H.s:
        raise ParameterError(f"need 1 <= d <= s, got d={d}")
    counts: dict = {}
    for e, m in H.edges.items():
        for D in itertools.combinations(e, d):
            counts[D] = counts.get(D, 0) + m
    return max(counts.values(), default=0)


def peeling_order(H: MultiHypergraph) -> list[int]:
    """Vertices in the order a min-degree peeling removes them."""
    alive = set(H.vertices())
    live_edges = {e for e in H.edges}
    deg = {v: 0 for v in alive}
    for e in live_edges:
        for v in e:
            deg[v] += 1
    order = []
    while alive:
        v = min(alive, key=lambda u: (deg[u], u))
        order.append(v)
        alive.discard(v)
        for e in list(H.incident(v)):
            if e in live_edges:
                live_edges.discard(e)
                for u in e:
                    if u != v:
                        deg[u] -= 1
    return order


def _search_order(H: MultiHypergraph) -> list[int]:
    # reverse peeling puts dense cores first; then make each step adjacent to the mapped prefix
    base = list(reversed(peeling_order(H)))
    rank = {v: i for i, v in enumerate(base)}
    order, placed = [], set()
    while len(order) < len(base):
        frontier = {u for v in placed for e in H.incident(v) for u in e if u not in placed}
        pool = frontier or (set(base) - placed)
        v = min(pool, key=lambda u: rank[u])
        order.append(v)
        placed.add(v)
    return order


def _plan(H: MultiHypergraph, fixed_keys, base=None):
    """Vertex order (fixed vertices first), closing edges per position, earlier neighbours, degrees."""
    base = base if base is not None else _search_order(H)
    fk = set(fixed_keys)
    order = [v for v in base if v in fk] + [v for v in base if v not in fk]
    pos = {v: i for i, v in enumerate(order)}
    closing: list[list[Edge]] = [[] for _ in order]
    for e in H.edges:
        closing[max(pos[v] for v in e)].append(e)
    earlier = []
    for i, v in enumerate(order):
        nb = {u for e in H.incident(v) for u in e if pos[u] < i}
        earlier.append(sorted(nb, key=pos.get))
    hdeg = [len(H.incident(v)) for v in order]
    return order, closing, earlier, hdeg


def _embed(G: MultiHypergraph, plan, within, fixed: dict):
    order, closing, earlier, hdeg = plan
    if len(set(fixed.values())) != len(fixed):
        return
    allowed = set(within) if within is not None else None
    gedges = G.edges
    inc = G._incidence
    phi: dict = {}
    used: set = set()
    all_g = None

    def candidates(i):
        nonlocal all_g
        v = order[i]
        if v in fixed:
            return (fixed[v],)
        nb = earlier[i]
        if not nb:
            if all_g is None:
                all_g = [w for w in G.vertices() if allowed is None or w in allowed]
            return all_g
        # the neighbour with the fewest incident G-edges gives the tightest pool
        anchor = min((phi[u] for u in nb), key=lambda w: len(inc.get(w, ())))
        cands = set()
        for e in inc.get(anchor, ()):
            cands.update(e)
        return sorted(cands)

    def rec(i):
        if i == len(order):
            yield dict(phi)
            return
        v = order[i]
        need = hdeg[i]
        for w in candidates(i):
            if w in used or (allowed is not None and w not in allowed):
                continue
            if len(inc.get(w, ())) < need:
                continue
            phi[v] = w
            if all(tuple(sorted([phi[u] for u in e])) in gedges for e in closing[i]):
                used.add(w)
                yield from rec(i + 1)
                used.discard(w)
            del phi[v]

    yield from rec(0)


def iter_embeddings(G: MultiHypergraph, H: MultiHypergraph, within: Iterable[int] | None = None,
                    fixed: dict | None = None):
    """Yield injective maps phi: V(H) -> V(G) sending every edge of H onto an edge of G.

    Parallel edges of G count as plain presence. ``within`` optionally restricts
    the image to a vertex subset; ``fixed`` pre-assigns part of the map.
    """
    if G.s != H.s:
        raise ParameterError(f"uniformity mismatch: {G.s} vs {H.s}")
    if H.num_vertices == 0:
        yield {}
        return
    fixed = dict(fixed or {})
    yield from _embed(G, _plan(H, fixed), within, fixed)


def contains_copy(G: MultiHypergraph, H: MultiHypergraph, within: Iterable[int] | None = None,
                  fixed: dict | None = None) -> dict | None:
    """First embedding of H into G found by backtracking, or None."""
    return next(iter_embeddings(G, H, within, fixed), None)


def embeddings_through(G: MultiHypergraph, H: MultiHypergraph, edge, within=None, plans: dict | None = None):
    """Yield embeddings of H into G whose image uses the given edge of G (possibly repeated).

    ``plans`` is an optional caller-owned cache of search plans for a fixed H.
    """
    edge = make_edge(edge)
    if edge not in G.edges:
        return
    if G.s != H.s:
        raise ParameterError(f"uniformity mismatch: {G.s} vs {H.s}")
    if plans is None:
        plans = {}
    for h in H.edges:
        plan = plans.get(h)
        if plan is None:
            plan = plans[h] = _plan(H, h, plans.setdefault("_base", _search_order(H)))
        for perm in itertools.permutations(edge):
            yield from _embed(G, plan, within, dict(zip(h, perm)))


def contains_copy_through(G: MultiHypergraph, H: MultiHypergraph, edge) -> dict | None:
    """Find a copy of H in G that uses the given edge of G."""
    return next(embeddings_through(G, H, edge), None)


def contains_copy_naive(G: MultiHypergraph, H: MultiHypergraph) -> bool:
    """Try every injection; only for tiny inputs (used as a test oracle)."""
    hv = H.vertices()
    gv = G.vertices()
    for img in itertools.permutations(gv, len(hv)):
        phi = dict(zip(hv, img))
        if all(tuple(sorted(phi[u] for u in e)) in G.edges for e in H.edges):
            return True
    return False
