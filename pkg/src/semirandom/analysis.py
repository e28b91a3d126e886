"""Exact densities, balance notions and threshold exponents.

Every quantity is a :class:`fractions.Fraction`; no floating point enters a
comparison. Maxima over sub-hypergraphs are taken over induced ones only: for a
fixed vertex set, adding edges can only raise ``f`` or ``g``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from decimal import Context, Decimal
from fractions import Fraction
from math import comb

import numpy as np

from .hypergraph import (
    MultiHypergraph,
    ParameterError,
    ResourceError,
    TargetSpec,
    build_target,
    contains_copy,
    delta_d,
)

MAX_ENUM_VERTICES = 22
_DEC = Context(prec=12)


def approx(x: Fraction) -> float:
    """Decimal rendering with 12 significant digits."""
    return float(_DEC.divide(Decimal(x.numerator), Decimal(x.denominator)))


def rational_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator, "approx": approx(x)}


# ------------------------------------------------------------ enumeration

def induced_profile(H: MultiHypergraph):
    """Vertex list, subset masks, vertex counts and induced edge counts (with multiplicity)."""
    verts = H.vertices()
    v = len(verts)
    if v > MAX_ENUM_VERTICES:
        raise ResourceError(f"sub-hypergraph enumeration needs v <= {MAX_ENUM_VERTICES}, got {v}")
    idx = {u: i for i, u in enumerate(verts)}
    masks = np.arange(1 << v, dtype=np.int64)
    nverts = np.zeros(1 << v, dtype=np.int64)
    for i in range(v):
        nverts += (masks >> i) & 1
    nedges = np.zeros(1 << v, dtype=np.int64)
    for e, m in H.edges.items():
        em = 0
        for u in e:
            em |= 1 << idx[u]
        nedges += m * ((masks & em) == em)
    return verts, masks, nverts, nedges


def _mask_to_sub(H, verts, mask) -> MultiHypergraph:
    return H.induced(verts[i] for i in range(len(verts)) if mask >> i & 1)


def _is_complete(H: MultiHypergraph) -> bool:
    return H.is_simple() and len(H.edges) == comb(H.num_vertices, H.s)


# ---------------------------------------------------------------- densities

def f_r(H: MultiHypergraph, r: int) -> Fraction:
    v = H.num_vertices
    if v < H.s:
        raise ParameterError(f"need at least s={H.s} vertices, got {v}")
    return Fraction(H.num_edges, v - H.s + r)


def mu_r(H: MultiHypergraph, r: int):
    """Maximum of ``f_r`` over induced sub-hypergraphs with at least s vertices, plus a maximizer."""
    s = H.s
    if H.num_vertices < s:
        raise ParameterError(f"need at least s={s} vertices, got {H.num_vertices}")
    if _is_complete(H):
        best, bk = None, None
        for q in range(s, H.num_vertices + 1):
            val = Fraction(comb(q, s), q - s + r)
            if best is None or val > best:
                best, bk = val, q
        return best, H.induced(H.vertices()[:bk])
    verts, masks, nv, ne = induced_profile(H)
    best, arg = None, None
    for mask in np.nonzero(nv >= s)[0]:
        val = Fraction(int(ne[mask]), int(nv[mask]) - s + r)
        if best is None or val > best:
            best, arg = val, int(mask)
    return best, _mask_to_sub(H, verts, arg)


def g_density(e: int, v: int, u: int) -> Fraction:
    """Density ``1/u`` for a single edge, ``(e-1)/(v-u)`` otherwise."""
    if e == 1:
        return Fraction(1, u)
    return Fraction(e - 1, v - u)


@dataclass
class BalanceReport:
    g: Fraction
    is_balanced: bool
    is_edge_balanced: bool
    witness: MultiHypergraph | None = None
    is_r_balanced: bool | None = None


def balance_report(F: MultiHypergraph, r: int | None = None) -> BalanceReport:
    """Edge-balancedness (density ``g``), ordinary balancedness, optionally r-balancedness."""
    if F.num_edges == 0:
        raise ParameterError("balance_report needs a non-empty hypergraph")
    u = F.s
    g = g_density(F.num_edges, F.num_vertices, u)
    dens = Fraction(F.num_edges, F.num_vertices)
    verts, masks, nv, ne = induced_profile(F)
    edge_bal, bal, witness = True, True, None
    for mask in np.nonzero(ne >= 1)[0]:
        e, v = int(ne[mask]), int(nv[mask])
        if g_density(e, v, u) > g:
            edge_bal = False
            if witness is None:
                witness = _mask_to_sub(F, verts, int(mask))
        if Fraction(e, v) > dens:
            bal = False
            if witness is None:
                witness = _mask_to_sub(F, verts, int(mask))
    rb = None
    if r is not None:
        rb = mu_r(F, r)[0] == f_r(F, r)
    return BalanceReport(g, bal, edge_bal, witness, rb)


def degeneracy(H: MultiHypergraph) -> int:
    """Max over peeling steps of the minimum degree."""
    if H.num_edges == 0:
        raise ParameterError("degeneracy needs a non-empty hypergraph")
    alive = set(H.vertices())
    live = dict(H.edges)
    deg = {v: H.degree(v) for v in alive}
    best = 0
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        best = max(best, deg[v])
        alive.discard(v)
        for e in H.incident(v):
            m = live.pop(e, 0)
            if m:
                for w in e:
                    if w != v:
                        deg[w] -= m
    return best


def degeneracy_bruteforce(H: MultiHypergraph) -> int:
    """Max over induced sub-hypergraphs of the minimum degree (isolated vertices count as 0)."""
    verts = H.vertices()
    best = 0
    for q in range(1, len(verts) + 1):
        for sub in itertools.combinations(verts, q):
            S = H.induced(sub)
            best = max(best, min(S.degree(v) for v in sub))
    return best


# ------------------------------------------------------------ clique solver

def falling(x: int, s: int) -> int:
    return math.perm(x, s) if x >= 0 else 0


def f_s_kl(k: int, ell: int, s: int) -> Fraction:
    """``((k)_s - (ell)_s) / (k - ell)`` with falling factorials."""
    if not k > ell >= 0:
        raise ParameterError(f"need k > ell >= 0, got k={k}, ell={ell}")
    return Fraction(falling(k, s) - falling(ell, s), k - ell)


def clique_constraint(r: int, s: int, k: int, ell: int) -> Fraction:
    """Left-hand side of the clique-strategy constraint; feasible when <= 0."""
    denom = comb(k, s) - comb(ell, s)
    total = sum(comb(ell, s - j) * (comb(k - ell, j) - comb(r, j)) for j in range(1, r + 1))
    return Fraction(k - ell - r) - Fraction((k - ell) * total, denom)


def ell_k(r: int, s: int, k: int) -> int:
    """Smallest feasible ``ell`` in ``[max(1, s-r), k-r]``."""
    if not 2 <= r < s <= k:
        raise ParameterError(f"need 2 <= r < s <= k, got r={r}, s={s}, k={k}")
    for ell in range(max(1, s - r), k - r + 1):
        if clique_constraint(r, s, k, ell) <= 0:
            return ell
    raise AssertionError("constraint must hold at ell = k - r")  # pragma: no cover


def ell_k_closed_form(k: int) -> int:
    """Ceiling of ``k + 3/2 - sqrt(6k + 1/4)`` via integer square roots."""
    # ell >= k + 3/2 - sqrt(6k+1/4)  <=>  2k + 3 - 2 ell <= sqrt(24k + 1)
    q = math.isqrt(24 * k + 1)
    return -((-(2 * k + 3 - q)) // 2)


def ell_k_quadratic(k: int) -> int:
    ell = 0
    while ell * ell - (2 * k + 3) * ell + k * k - 3 * k + 2 > 0:
        ell += 1
    return ell


def clique_exponent(r: int, s: int, k: int, ell: int) -> Fraction:
    return r - Fraction(k - ell, comb(k, s) - comb(ell, s))


# ---------------------------------------------------------------- starplus

STRICT, EQUALITY, VIOLATED = "strict", "equality", "violated"


def condition14(lam1: int, lam2: int, k: int, s: int, r: int) -> str:
    """Compare (lam1+lam2)/(lam1-1) with (k-s+r)/(k-s), cross-multiplied."""
    lhs = (lam1 + lam2) * (k - s)
    rhs = (k - s + r) * (lam1 - 1)
    if lhs < rhs:
        return STRICT
    if lhs == rhs:
        return EQUALITY
    return VIOLATED


def full_excess_limit(k: int, s: int, r: int) -> Fraction | None:
    """Largest excess allowed for a full starplus on k vertices; None means unbounded (k = s)."""
    if k == s:
        return None
    return Fraction(r * comb(k - s + r, r) - (k - s + r), k - s)


@dataclass
class StarplusDecomposition:
    center: tuple
    lam1: int
    lam2: int
    flower: MultiHypergraph
    cap: MultiHypergraph
    rays: list
    condition14: str
    flower_edge_balanced: bool
    k: int
    s: int

    @property
    def c(self) -> int:
        return len(self.center)

    @property
    def is_full(self) -> bool:
        return self.lam1 == comb(self.k - self.c, self.s - self.c)


def _decompose_at(H: MultiHypergraph, C: tuple) -> StarplusDecomposition | None:
    s, k, c = H.s, H.num_vertices, len(C)
    cs = set(C)
    rays, cap = [], MultiHypergraph(s)
    flower = MultiHypergraph(s - c)
    lam1 = 0
    for e, m in sorted(H.edges.items()):
        if cs <= set(e):
            rays.append(e)
            lam1 += m
            flower.add([v for v in e if v not in cs], m)
        else:
            cap.add(e, m)
    if lam1 == 0:
        return None
    r = s - c
    cond = condition14(lam1, cap.num_edges, k, s, r)
    eb = balance_report(flower).is_edge_balanced
    return StarplusDecomposition(tuple(C), lam1, cap.num_edges, flower, cap, rays, cond, eb, k, s)


def starplus_decompose(H: MultiHypergraph, c: int) -> StarplusDecomposition | None:
    """Center of size c with the most rays (ties: lexicographically smallest)."""
    if not 1 <= c < H.s:
        raise ParameterError(f"need 1 <= c < s, got c={c}")
    counts: dict = {}
    for e, m in H.edges.items():
        for C in itertools.combinations(e, c):
            counts[C] = counts.get(C, 0) + m
    if not counts:
        return None
    best = max(counts.values())
    C = min(C for C, v in counts.items() if v == best)
    return _decompose_at(H, C)


# ----------------------------------------------------------- path / cycle

def rsl_threshold(kind: str, m: int, s: int, ell: int, r: int) -> Fraction:
    """Exact exponent for ell-tight paths and cycles in the covered regime."""
    if kind not in ("path", "cycle"):
        raise ParameterError(f"kind must be 'path' or 'cycle', got {kind!r}")
    if not (m >= 3 and s >= 3 and 1 <= ell and 2 * ell <= s and s - r >= ell):
        raise ParameterError(
            f"parameters outside the solved path/cycle regime: m={m}, s={s}, ell={ell}, r={r}")
    if kind == "path":
        return Fraction(0)
    if s - r >= 2 * ell:
        return Fraction(0)
    if s - r == 2 * ell - 1:
        return Fraction(1, 2)
    return Fraction(r - s + 2 * ell, 3)


def mu_path_formula(m: int, s: int, ell: int, r: int) -> Fraction:
    if r <= s - ell:
        return Fraction(1, r)
    return Fraction(m, (s - ell) * m + ell - s + r)


def mu_cycle_formula(m: int, s: int, ell: int, r: int) -> Fraction:
    return max(Fraction(m, (s - ell) * m - s + r), Fraction(1, r))


# ------------------------------------------------------------ reports

@dataclass
class Bound:
    source: str
    value: Fraction
    certificate: str

    def to_dict(self) -> dict:
        return {"source": self.source, "exponent": rational_json(self.value),
                "certificate": self.certificate}


@dataclass
class ThresholdReport:
    r: int
    s: int
    v: int
    e: int
    f: Fraction
    mu: Fraction
    lower_general: Fraction
    lower_mu: Fraction
    lower_bounds: list = field(default_factory=list)
    upper_bounds: list = field(default_factory=list)

    @property
    def best_lower(self) -> Fraction:
        return max(b.value for b in self.lower_bounds)

    @property
    def best_upper(self) -> Fraction | None:
        return min((b.value for b in self.upper_bounds), default=None)

    @property
    def tight(self) -> bool:
        return self.best_upper is not None and self.best_upper == self.best_lower

    def upper(self, source: str) -> Fraction | None:
        for b in self.upper_bounds:
            if b.source == source:
                return b.value
        return None

    def to_dict(self) -> dict:
        out = {
            "r": self.r, "s": self.s, "v": self.v, "e": self.e,
            "f": rational_json(self.f), "mu": rational_json(self.mu),
            "lower_general": rational_json(self.lower_general),
            "lower_mu": rational_json(self.lower_mu),
            "lower_bounds": [b.to_dict() for b in self.lower_bounds],
            "upper_bounds": [b.to_dict() for b in self.upper_bounds],
            "best_lower": rational_json(self.best_lower),
            "best_upper": None if self.best_upper is None else rational_json(self.best_upper),
            "tight": self.tight,
        }
        return out


def _match_ell_family(H: MultiHypergraph):
    """Recognise H as an ell-tight path or cycle; returns (kind, m, ell) or None."""
    s, m, v = H.s, H.num_edges, H.num_vertices
    if not H.is_simple():
        return None
    for ell in range(1, s):
        if (s - ell) * m + ell == v:
            P = build_target(TargetSpec.tight_path(m, s, ell))
            if contains_copy(H, P) is not None:
                return "path", m, ell
        if (s - ell) * m == v and m * (s - ell) >= s + 0 and m >= (s + 1) // (s - ell):
            try:
                Cy = build_target(TargetSpec.tight_cycle(m, s, ell))
            except ParameterError:
                continue
            if contains_copy(H, Cy) is not None:
                return "cycle", m, ell
    return None


def corollary7_k(H: MultiHypergraph, r: int):
    s = H.s
    lam = H.num_edges - delta_d(H, s - r)
    k = max(H.num_vertices, s)
    while True:
        lim = full_excess_limit(k, s, r)
        if lim is None or lam <= lim:
            return k, lam
        k += 1


def threshold_report(H: MultiHypergraph, r: int) -> ThresholdReport:
    """Collect every applicable lower and upper bound on the threshold exponent."""
    s = H.s
    if not 1 <= r < s:
        raise ParameterError(f"need 1 <= r < s, got r={r}, s={s}")
    if H.num_edges == 0:
        raise ParameterError("target has no edges")
    k, m = H.num_vertices, H.num_edges
    f = f_r(H, r)
    mu, _ = mu_r(H, r)
    raw_general = r - Fraction(k - s + r, m)
    lower_general = max(Fraction(0), raw_general)
    lower_mu = r - 1 / mu
    rep = ThresholdReport(r, s, k, m, f, mu, lower_general, lower_mu)
    cert = "always applies" + ("" if raw_general >= 0 else f"; raw value {raw_general} clamped at 0")
    rep.lower_bounds.append(Bound("general_lower", lower_general, cert))
    rep.lower_bounds.append(Bound("mu_lower", lower_mu, f"mu = {mu}"))

    def exact(src, val, certificate):
        rep.lower_bounds.append(Bound(src, val, certificate))
        rep.upper_bounds.append(Bound(src, val, certificate))

    if r == 1:
        d = degeneracy(H)
        exact("degeneracy_exact", 1 - Fraction(1, d), f"r = 1, degeneracy {d}")
        return rep

    # balanced starplus case: any center of size s-r qualifies
    c = s - r
    centers = sorted({C for e in H.edges for C in itertools.combinations(e, c)})
    for C in centers:
        dec = _decompose_at(H, C)
        if dec is None or dec.condition14 == VIOLATED or not dec.flower_edge_balanced:
            continue
        val = r - Fraction(k - s + r, dec.lam1 + dec.lam2)
        exact("starplus_balanced", val,
              f"center {list(C)}, rays {dec.lam1}, excess {dec.lam2}, "
              f"ray condition holds ({dec.condition14}), flower edge-balanced")
        break

    # full starplus corollary
    for C in centers:
        dec = _decompose_at(H, C)
        if dec is None or not dec.is_full:
            continue
        lim = full_excess_limit(k, s, r)
        if lim is None or dec.lam2 <= lim:
            val = r - Fraction(k - s + r, comb(k - s + r, r) + dec.lam2)
            exact("full_starplus", val,
                  f"center {list(C)}, full flower, excess {dec.lam2} <= {lim if lim is not None else 'inf'}")
            break

    kk, lam = corollary7_k(H, r)
    rep.upper_bounds.append(Bound(
        "generic_upper", r - Fraction(kk - s + r, comb(kk - s + r, r) + lam),
        f"smallest k = {kk} with excess {lam} = e_H - max (s-r)-degree"))

    if _is_complete(H):
        ell = ell_k(r, s, k)
        rep.upper_bounds.append(Bound("clique_upper", clique_exponent(r, s, k, ell),
                                      f"clique K_{k}, ell = {ell}"))

    fam = _match_ell_family(H)
    if fam is not None:
        kind, mm, ell = fam
        try:
            val = rsl_threshold(kind, mm, s, ell, r)
        except ParameterError:
            pass
        else:
            exact("path_cycle_exact", val, f"{kind}, m={mm}, ell={ell}")
    return rep
