"""The semi-random process engine."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .hypergraph import MultiHypergraph, ParameterError, contains_copy, contains_copy_through

RNG_ALGORITHM = "philox-seedseq-v1"
BLOCK = 1024


class StrategyContractError(RuntimeError):
    """A strategy returned an invalid response or a false success claim."""


def make_rng(seed: int, trial: int = 0, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, trial)``; ``stream=1`` is reserved for strategies."""
    key = [int(seed), int(trial)] + ([int(stream)] if stream else [])
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def _raw_block(rng: np.random.Generator, n: int, r: int, size: int) -> np.ndarray:
    raw = np.empty((size, r), dtype=np.int64)
    for j in range(r):
        raw[:, j] = rng.integers(0, n - r + j + 1, size=size)
    return raw


def draw_uniform_r_subset(rng: np.random.Generator, n: int, r: int) -> tuple:
    """One uniformly random r-subset of [n] as a sorted tuple."""
    if not 0 <= r <= n:
        raise ParameterError(f"need 0 <= r <= n, got r={r}, n={n}")
    return tuple(_kernels.floyd_resolve(_raw_block(rng, n, r, 1), n)[0].tolist())


class SubsetStream:
    """Buffered stream of uniform r-subsets; the sequence does not depend on how many are consumed."""

    def __init__(self, rng: np.random.Generator, n: int, r: int, block: int = BLOCK):
        if not 1 <= r <= n:
            raise ParameterError(f"need 1 <= r <= n, got r={r}, n={n}")
        self.rng, self.n, self.r, self.block = rng, n, r, block
        self._buf: list = []
        self._pos = 0

    def _refill(self):
        arr = _kernels.floyd_resolve(_raw_block(self.rng, self.n, self.r, self.block), self.n)
        self._buf = [tuple(row) for row in arr.tolist()]
        self._pos = 0

    def next(self) -> tuple:
        if self._pos >= len(self._buf):
            self._refill()
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def take(self, t: int) -> np.ndarray:
        """Next ``t`` subsets as an int array of shape (t, r)."""
        out = np.empty((t, self.r), dtype=np.int64)
        for i in range(t):
            out[i] = self.next()
        return out


def subset_codes(subsets: np.ndarray, n: int) -> np.ndarray:
    r = subsets.shape[1]
    if n ** r >= 2 ** 62:
        raise ParameterError("n^r too large for integer codes")
    codes = np.zeros(subsets.shape[0], dtype=np.int64)
    for j in range(r):
        codes = codes * n + (subsets[:, j] - 1)
    return codes


# ------------------------------------------------------------------ engine

@dataclass
class GameState:
    n: int
    r: int
    s: int
    graph: MultiHypergraph
    step: int = 0
    strategy_state: object = None
    rng: np.random.Generator | None = None


class Strategy:
    """Base class for players.

    ``respond`` must be a deterministic function of the history and ``U``.
    ``claim`` returns the vertex set of a completed copy, or ``None``.
    ``check_every`` asks the engine to search for copies through each new edge.
    """

    name = "strategy"
    check_every: int | None = None

    def start(self, state: GameState, budget: int) -> None:
        self.reserved: set = set()

    def respond(self, state: GameState, U: tuple) -> tuple:
        raise NotImplementedError

    def claim(self):
        return None


def waste(n: int, U: Iterable[int], size: int, excluded: Iterable[int] = ()) -> tuple:
    """The ``size`` smallest vertices outside ``U`` and ``excluded``."""
    bad = set(U) | set(excluded)
    out = []
    v = 1
    while len(out) < size:
        if v > n:
            raise StrategyContractError("not enough free vertices for a wasted move")
        if v not in bad:
            out.append(v)
        v += 1
    return tuple(out)


class LexSmallest(Strategy):
    """Null strategy: always the smallest valid V."""

    name = "lex_smallest"

    def respond(self, state, U):
        return waste(state.n, U, state.s - state.r)


@dataclass
class ProcessOutcome:
    success_step: int | None
    final_graph: MultiHypergraph
    duplicate_draws: int
    steps: int
    trace: list | None = None
    embedding: dict | None = None
    strategy: Strategy | None = field(default=None, repr=False)


def run(n: int, r: int, s: int, strategy: Strategy, target: MultiHypergraph | None, budget: int,
        record_trace: bool = False, seed: int = 0, trial: int = 0, rng=None,
        full_check: bool = False, stop_on_success: bool = True) -> ProcessOutcome:
    """Play up to ``budget`` rounds of the process with the given strategy."""
    if not 1 <= r < s <= n:
        raise ParameterError(f"need 1 <= r < s <= n, got r={r}, s={s}, n={n}")
    if budget < 0:
        raise ParameterError("budget must be non-negative")
    if rng is None:
        rng = make_rng(seed, trial)
    stream = SubsetStream(rng, n, r)
    state = GameState(n, r, s, MultiHypergraph(s, n), rng=make_rng(seed, trial, 1))
    strategy.start(state, budget)
    seen: set = set()
    dups = 0
    trace = [] if record_trace else None
    success, emb = None, None
    k = s - r
    for step in range(1, budget + 1):
        U = stream.next()
        dup = U in seen
        if dup:
            dups += 1
        else:
            seen.add(U)
        V = tuple(sorted(strategy.respond(state, U)))
        if len(V) != k or len(set(V)) != k or set(V) & set(U) or V[0] < 1 or V[-1] > n:
            raise StrategyContractError(
                f"step {step}: strategy {strategy.name} returned V={V} for U={U}")
        edge = state.graph.add(U + V)
        state.step = step
        if trace is not None:
            trace.append((step, U, V, int(dup)))
        if target is None or success is not None:
            continue
        claim = strategy.claim()
        if claim is not None:
            emb = contains_copy(state.graph, target, within=claim)
            if emb is None and full_check:
                emb = contains_copy(state.graph, target)
            if emb is None:
                raise StrategyContractError(
                    f"step {step}: strategy {strategy.name} claimed a copy on {sorted(claim)} that is absent")
            success = step
        elif strategy.check_every and step % strategy.check_every == 0:
            emb = contains_copy_through(state.graph, target, edge)
            if emb is not None:
                success = step
        if success is not None and stop_on_success:
            break
    return ProcessOutcome(success, state.graph, dups, state.step, trace, emb, strategy)


def replay_trace(trace: Iterable, n: int, s: int) -> MultiHypergraph:
    g = MultiHypergraph(s, n)
    for _, U, V, _ in trace:
        g.add(tuple(U) + tuple(V))
    return g


def trace_to_csv(trace: Iterable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "U", "V", "duplicate_flag"])
    for step, U, V, dup in trace:
        w.writerow([step, ";".join(map(str, U)), ";".join(map(str, V)), dup])
    return buf.getvalue()


def trace_from_csv(text: str) -> list:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["step", "U", "V", "duplicate_flag"]:
        raise ParameterError("trace CSV header must be step,U,V,duplicate_flag")
    out = []
    for row in rows[1:]:
        out.append((int(row[0]), tuple(int(x) for x in row[1].split(";")),
                    tuple(int(x) for x in row[2].split(";") if x), int(row[3])))
    return out


def duplicate_rate_check(n: int, r: int, t: int, trials: int, seed: int = 0) -> float:
    """Mean number of repeated r-sets among ``t`` uniform draws."""
    total = 0
    for i in range(trials):
        stream = SubsetStream(make_rng(seed, i), n, r)
        codes = subset_codes(stream.take(t), n) if t else np.zeros(0, dtype=np.int64)
        total += _kernels.count_duplicates(codes)
    return total / trials


def expected_duplicates(n: int, r: int, t: int) -> float:
    """Exact mean of t minus the number of distinct sets among t draws."""
    from math import comb

    N = comb(n, r)
    return t - N * (1 - (1 - 1 / N) ** t)
