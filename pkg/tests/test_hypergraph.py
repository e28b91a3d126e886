import itertools
import json
import math
import random

import pytest

from semirandom.hypergraph import (FANO_PLANE, MultiHypergraph, ParameterError, TargetSpec, build_target,
                                   contains_copy, contains_copy_through, delta_d, double_clique_plus_root,
                                   embeddings_through, iter_embeddings)


def edge_set(H):
    return set(H.edges)


def naive_contains(G, H):
    """All injections V(H) -> V(G); independent of the backtracking search."""
    hv, gv = H.vertices(), G.vertices()
    if len(hv) > len(gv):
        return False
    gedges = set(G.edges)
    for image in itertools.permutations(gv, len(hv)):
        phi = dict(zip(hv, image))
        if all(tuple(sorted(phi[v] for v in e)) in gedges for e in H.edges):
            return True
    return False


class TestBuildTarget:
    def test_tight_cycle_c7(self):
        C = build_target(TargetSpec.tight_cycle(7, 3, 2))
        want = {(1, 2, 3), (2, 3, 4), (3, 4, 5), (4, 5, 6), (5, 6, 7), (1, 6, 7), (1, 2, 7)}
        assert edge_set(C) == want
        assert C.vertices() == list(range(1, 8))

    def test_loose_cycle_c4_31(self):
        C = build_target(TargetSpec.tight_cycle(4, 3, 1))
        assert edge_set(C) == {(1, 2, 3), (3, 4, 5), (5, 6, 7), (1, 7, 8)}
        assert C.num_vertices == 8

    def test_degenerate_clique(self):
        assert edge_set(build_target(TargetSpec.clique(3, 3))) == {(1, 2, 3)}

    def test_fano_starplus(self):
        cap = [[v + 1 for v in e] for e in FANO_PLANE]
        H = build_target({"family": "full_starplus", "k": 8, "s": 3, "c": 1, "cap": cap})
        rays = [e for e in H.edges if 1 in e]
        assert len(rays) == 21 and H.num_edges == 28
        assert H.is_simple()

    @pytest.mark.parametrize("s", [2, 3, 4, 5])
    def test_generator_counts(self, s):
        for ell in range(1, s):
            for m in range(1, 7):
                P = build_target(TargetSpec.tight_path(m, s, ell))
                assert P.num_vertices == (s - ell) * m + ell and P.num_edges == m
                try:
                    C = build_target(TargetSpec.tight_cycle(m, s, ell))
                except ParameterError:
                    continue
                assert C.num_vertices == (s - ell) * m and C.num_edges == m
        for k in range(s, s + 4):
            assert build_target(TargetSpec.clique(k, s)).num_edges == math.comb(k, s)

    def test_full_starplus_edge_count(self):
        cap = [(2, 3, 4), (3, 4, 5), (2, 5, 6)]
        for lam in range(len(cap) + 1):
            H = build_target({"family": "full_starplus", "k": 6, "s": 3, "c": 1, "cap": cap[:lam]})
            assert H.num_edges == math.comb(5, 2) + lam

    def test_wheel(self):
        W = build_target(TargetSpec.wheel(8, 5, 1))
        assert W.num_vertices == 8
        rays = [e for e in W.edges if 1 in e]
        assert len(rays) == 7 and W.num_edges == 14

    def test_errors(self):
        with pytest.raises(ParameterError, match="ell"):
            build_target(TargetSpec.tight_path(3, 3, 3))
        with pytest.raises(ParameterError, match="too short"):
            build_target(TargetSpec.tight_cycle(2, 3, 2))
        with pytest.raises(ParameterError, match="contains the center"):
            build_target({"family": "full_starplus", "k": 5, "s": 3, "c": 1, "cap": [[1, 2, 3]]})

    def test_json_round_trip(self):
        spec = TargetSpec.tight_cycle(4, 3, 1)
        again = TargetSpec.from_json(spec.to_json())
        assert again == spec
        assert json.loads(spec.to_json())["family"] == "tight_cycle"

    def test_unknown_field_rejected(self):
        with pytest.raises(ParameterError):
            TargetSpec.from_dict({"family": "clique", "k": 4, "s": 3, "colour": 1})


class TestContainment:
    def test_identity(self):
        C = build_target(TargetSpec.tight_cycle(7, 3, 2))
        emb = contains_copy(C, C)
        assert emb is not None
        assert {tuple(sorted(emb[v] for v in e)) for e in C.edges} == set(C.edges)

    def test_cycle_contains_path(self):
        C = build_target(TargetSpec.tight_cycle(7, 3, 2))
        P = MultiHypergraph(3, edges=[(1, 2, 3), (2, 3, 4)])
        assert contains_copy(C, P) is not None

    def test_path_lacks_cycle(self):
        P = build_target(TargetSpec.tight_path(4, 3, 1))
        C = build_target(TargetSpec.tight_cycle(4, 3, 1))
        assert contains_copy(P, C) is None
        assert not naive_contains(P, C)

    def test_uniformity_mismatch(self):
        with pytest.raises(ParameterError):
            contains_copy(MultiHypergraph(3, edges=[(1, 2, 3)]), MultiHypergraph(2, edges=[(1, 2)]))

    def test_agrees_with_naive(self):
        rng = random.Random(7)
        for _ in range(400):
            s = rng.choice([2, 3])
            vg, vh = rng.randint(s, 7), rng.randint(s, 5)
            all_g = list(itertools.combinations(range(1, vg + 1), s))
            all_h = list(itertools.combinations(range(1, vh + 1), s))
            G = MultiHypergraph(s, edges=rng.sample(all_g, rng.randint(1, len(all_g))))
            H = MultiHypergraph(s, edges=rng.sample(all_h, rng.randint(1, min(len(all_h), 6))))
            emb = contains_copy(G, H)
            assert (emb is not None) == naive_contains(G, H)
            if emb is not None:
                assert len(set(emb.values())) == len(emb)
                assert all(tuple(sorted(emb[v] for v in e)) in G.edges for e in H.edges)

    def test_monotone_under_adding_edges(self):
        rng = random.Random(3)
        H = build_target(TargetSpec.tight_path(2, 3, 2))
        G = MultiHypergraph(3, 8)
        found = False
        for e in rng.sample(list(itertools.combinations(range(1, 9), 3)), 30):
            G.add(e)
            now = contains_copy(G, H) is not None
            assert now or not found
            found = now
        assert found

    def test_within_restricts_search(self):
        G = MultiHypergraph(3, edges=[(1, 2, 3), (4, 5, 6)])
        H = MultiHypergraph(3, edges=[(1, 2, 3)])
        emb = contains_copy(G, H, within=[4, 5, 6])
        assert set(emb.values()) == {4, 5, 6}
        assert contains_copy(G, H, within=[1, 2, 4]) is None

    def test_embeddings_through_new_edge(self):
        C = build_target(TargetSpec.tight_cycle(4, 3, 1))
        G = MultiHypergraph(3, 30)
        mapping = {v: v + 10 for v in range(1, 9)}
        edges = [tuple(mapping[v] for v in e) for e in C.edges]
        for e in edges[:-1]:
            G.add(e)
        assert contains_copy_through(G, C, edges[0]) is None
        G.add(edges[-1])
        emb = contains_copy_through(G, C, edges[-1])
        assert emb is not None
        assert any(tuple(sorted(emb[v] for v in e)) == edges[-1] for e in C.edges)
        assert next(embeddings_through(G, C, edges[-1]), None) is not None

    def test_parallel_edges_count_once(self):
        G = MultiHypergraph(2, edges=[(1, 2), (1, 2)])
        assert G.num_edges == 2
        assert contains_copy(G, MultiHypergraph(2, edges=[(1, 2), (2, 3)])) is None

    def test_iter_embeddings_counts_automorphisms(self):
        K = build_target(TargetSpec.clique(4, 3))
        assert sum(1 for _ in iter_embeddings(K, K)) == 24


class TestDelta:
    def test_k6(self):
        assert delta_d(build_target(TargetSpec.clique(6, 3)), 1) == 10

    def test_single_edge(self):
        assert delta_d(MultiHypergraph(4, edges=[(1, 2, 3, 4)]), 4) == 1

    def test_c5_pairs(self):
        C = build_target(TargetSpec.tight_cycle(5, 3, 2))
        brute = max(sum(1 for e in C.edges if set(D) <= set(e)) for D in itertools.combinations(range(1, 6), 2))
        assert delta_d(C, 2) == brute == 2

    def test_range_error(self):
        with pytest.raises(ParameterError):
            delta_d(MultiHypergraph(3, edges=[(1, 2, 3)]), 4)


def test_multihypergraph_invariants():
    G = MultiHypergraph(3, 10)
    for e in [(3, 2, 1), (1, 2, 3), (4, 5, 6)]:
        G.add(e)
    assert G.num_edges == 3 and G.edges[(1, 2, 3)] == 2
    with pytest.raises(ParameterError):
        G.add((1, 2))
    with pytest.raises(ParameterError):
        G.add((1, 2, 11))


def test_double_clique_pattern():
    F = double_clique_plus_root()
    assert F.total == 6 * 2 + 4
