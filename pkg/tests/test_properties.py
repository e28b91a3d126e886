import itertools
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from semirandom import analysis as A
from semirandom import montecarlo as M
from semirandom import oracle as O
from semirandom.hypergraph import MultiHypergraph, contains_copy
from semirandom.process import trace_from_csv, trace_to_csv


@st.composite
def small_hypergraphs(draw, max_v=7):
    s = draw(st.sampled_from([2, 3]))
    v = draw(st.integers(s + 1, max_v))
    pool = list(itertools.combinations(range(1, v + 1), s))
    edges = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=min(10, len(pool)), unique=True))
    return MultiHypergraph(s, edges=edges)


@settings(max_examples=60, deadline=None)
@given(small_hypergraphs())
def test_mu_dominates_f(H):
    r = H.s - 1
    mu, witness = A.mu_r(H, r)
    assert mu >= A.f_r(H, r)
    assert A.f_r(witness, r) == mu


@settings(max_examples=60, deadline=None)
@given(small_hypergraphs())
def test_degeneracy_matches_brute_force(H):
    assert A.degeneracy(H) == A.degeneracy_bruteforce(H)


@settings(max_examples=40, deadline=None)
@given(small_hypergraphs(max_v=6), st.data())
def test_subgraph_is_contained(H, data):
    keep = data.draw(st.lists(st.sampled_from(H.edge_list()), min_size=1, unique=True))
    perm = data.draw(st.permutations(list(range(1, 10))))
    relabel = {v: perm[v - 1] for v in range(1, 10)}
    F = MultiHypergraph(H.s, edges=[tuple(sorted(relabel[v] for v in e)) for e in keep])
    assert contains_copy(H, F) is not None


@given(st.integers(2, 3).flatmap(lambda r: st.tuples(st.just(r), st.integers(r + 1, 5))).flatmap(
    lambda rs: st.tuples(st.just(rs[0]), st.just(rs[1]), st.integers(rs[1], 60))))
def test_ell_k_range(args):
    r, s, k = args
    ell = A.ell_k(r, s, k)
    assert s - r <= ell <= k - r


@given(st.integers(2, 6), st.integers(0, 40), st.integers(0, 40))
def test_falling_quotient_monotone(s, a, b):
    k = s + max(a, b)
    ell = min(a, b)
    if ell + 1 < k:
        assert A.f_s_kl(k, ell, s) < A.f_s_kl(k, ell + 1, s)


@given(st.integers(0, 200), st.integers(1, 200))
def test_wilson_contains_estimate(successes, trials):
    successes = min(successes, trials)
    lo, hi = M.wilson_interval(successes, trials)
    assert 0.0 <= lo <= successes / trials <= hi <= 1.0


@given(st.lists(st.tuples(st.floats(0, 1), st.integers(1, 50)), min_size=1, max_size=12))
def test_isotonic_monotone_and_mass_preserving(pairs):
    vals, ws = zip(*pairs)
    fit = M.isotonic(vals, ws)
    assert all(a <= b + 1e-12 for a, b in zip(fit, fit[1:]))
    assert abs(sum(f * w for f, w in zip(fit, ws)) - sum(v * w for v, w in zip(vals, ws))) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=3), st.integers(0, 25), st.integers(0, 2))
def test_hit_probability_drops_with_multiplicity(mults, t, which):
    which %= len(mults)
    more = list(mults)
    more[which] += 1
    a = O.exact_hit_probability(mults, 8, 2, t, mode="exact").exact
    b = O.exact_hit_probability(more, 8, 2, t, mode="exact").exact
    assert 0 <= b <= a <= 1
    assert isinstance(a, Fraction)


@given(st.lists(st.tuples(st.lists(st.integers(1, 99), min_size=2, max_size=2, unique=True),
                          st.lists(st.integers(100, 199), min_size=1, max_size=2, unique=True),
                          st.integers(0, 1)), max_size=20))
def test_trace_csv_round_trip(rows):
    trace = [(i + 1, tuple(sorted(U)), tuple(sorted(V)), d) for i, (U, V, d) in enumerate(rows)]
    assert trace_from_csv(trace_to_csv(trace)) == trace
