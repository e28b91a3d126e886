import math

import numpy as np
import pytest

from semirandom import analysis
from semirandom.hypergraph import MultiHypergraph, ParameterError, TargetSpec, build_target, contains_copy
from semirandom.process import GameState, StrategyContractError, make_rng, run
from semirandom.strategies import (STRATEGIES, BaselineRandom, CliqueBuilder, CycleGeneralX, CycleThreePhase,
                                   FlowerLedger, FreshPool, LooseCycleBuilder, PathBuilder, PathGrower,
                                   PhaseClock, StarplusBuilder, make_strategy)


def drive(strategy, n, r, s, draws, budget):
    state = GameState(n, r, s, MultiHypergraph(s, n), rng=make_rng(0))
    strategy.start(state, budget)
    return [tuple(sorted(strategy.respond(state, tuple(U)))) for U in draws]


def success_count(make, spec, n, r, budget, trials):
    H = build_target(spec)
    return sum(run(n, r, spec.params["s"], make(), H, budget, trial=i).success_step is not None
               for i in range(trials))


class TestPhaseClock:
    def test_phases(self):
        c = PhaseClock(2, 3, 4)
        assert [c.phase(t) for t in range(1, 11)] == [0, 0, 1, 1, 1, 2, 2, 2, 2, 3]
        assert c.offset(3) == 1 and c.offset(6) == 1 and c.budget == 9

    def test_negative(self):
        with pytest.raises(ParameterError):
            PhaseClock(-1, 0, 0)


def test_fresh_pool_skips_marked():
    pool = FreshPool(range(1, 10))
    pool.mark([1, 3])
    assert pool.take(2) == [2, 4]
    assert pool.take(2, avoid=[5]) == [6, 7]


class TestPaths:
    def test_grower_is_ell_tight(self):
        g = PathGrower(5, 2, 2, FreshPool(range(1, 101)))
        assert g.try_extend((50, 60)) == (1, 2, 3)
        V = g.try_extend((70, 80))
        # two vertices of the tail edge plus one fresh vertex
        assert len(V) == 3 and len(set(V) & set(g.edges[0])) == 2
        g.try_extend((90, 91))
        for a, b in zip(g.edges, g.edges[1:]):
            assert len(set(a) & set(b)) == 2
        P = build_target(TargetSpec.tight_path(3, 5, 2))
        G = MultiHypergraph(5, edges=g.edges)
        assert contains_copy(G, P) is not None

    def test_touching_draw_is_wasted(self):
        g = PathGrower(3, 1, 2, FreshPool(range(1, 51)))
        g.try_extend((10, 20))
        assert g.try_extend((10, 30)) is None and len(g.edges) == 1

    def test_path_builder_wastes_outside_path(self):
        Vs = drive(PathBuilder(3, 3, 1, 2), 40, 2, 3, [(10, 20), (10, 30), (31, 32)], 3)
        first = set((10, 20) + Vs[0])
        assert not set(Vs[1]) & first
        assert len(set(Vs[2]) & first) == 1

    def test_regime_errors(self):
        with pytest.raises(ParameterError):
            PathBuilder(3, 4, 3, 2)
        with pytest.raises(ParameterError):
            LooseCycleBuilder(4, 4, 1, 3)
        with pytest.raises(ParameterError):
            CycleThreePhase(4, 4, 2, 2)
        with pytest.raises(ParameterError):
            CycleGeneralX(4, 3, 1, 2)

    def test_loose_cycle_closes_in_m_steps(self):
        wins = success_count(lambda: LooseCycleBuilder(3, 5, 1, 2), TargetSpec.tight_cycle(3, 5, 1), 10_000, 2, 3, 30)
        assert wins >= 27


class TestCycles:
    def test_three_phase_clock(self):
        c = CycleThreePhase(4, 3, 1, 2)._clock(101)
        assert (c.t0, c.t1, c.t2) == (1, 50, 50)
        c = CycleThreePhase(6, 3, 1, 2)._clock(40)
        assert (c.t0, c.t1) == (3, 18)

    def test_three_phase_success(self):
        wins = success_count(lambda: CycleThreePhase(4, 3, 1, 2), TargetSpec.tight_cycle(4, 3, 1), 1000, 2, 95, 20)
        assert wins >= 16

    def test_general_x(self):
        spec = TargetSpec.tight_cycle(4, 4, 2)
        H = build_target(spec)
        wins, overloaded = 0, 0
        for i in range(20):
            st = CycleGeneralX(4, 4, 2, 2)
            wins += run(500, 2, 4, st, H, 300, trial=i).success_step is not None
            overloaded += st.overloaded
        assert wins >= 10 and overloaded == 0


class TestStarplus:
    def test_split_rule(self):
        st = StarplusBuilder(build_target(TargetSpec.clique(4, 3)), 2)
        assert st._clock(1000, 100).t1 == 50
        st5 = StarplusBuilder(build_target(TargetSpec.clique(5, 3)), 2)
        assert st5._clock(1000, 700).t1 == 700 // math.ceil(math.log(1000))

    def test_k4_success_and_ledger(self):
        H = build_target(TargetSpec.clique(4, 3))
        wins = 0
        for i in range(8):
            st = StarplusBuilder(H, 2)
            out = run(400, 2, 3, st, H, int(3 * 400 ** 1.25), trial=i)
            wins += out.success_step is not None
            assert st.ledger.check_invariants()
            for c in st.ledger.copies:
                assert not set(st.C) & set(c.vertices)
        assert wins >= 6

    def test_rays_only_target(self):
        H = build_target({"family": "full_starplus", "k": 5, "s": 3, "c": 1, "cap": []})
        st = StarplusBuilder(H, 2)
        out = run(30, 2, 3, st, H, 400, seed=3)
        assert out.success_step is not None
        assert st.clock.t1 == 400

    def test_cap_templates_are_distinct(self):
        H = build_target(TargetSpec.clique(5, 3))
        keys = [T for _, T in StarplusBuilder(H, 2).template]
        assert len(keys) == len(set(keys)) == 4

    def test_wrong_center_size(self):
        H = build_target(TargetSpec.clique(4, 3))
        with pytest.raises(ParameterError):
            StarplusBuilder(H, 2, decomposition=analysis.starplus_decompose(H, 2))


class TestLedger:
    def test_sharing_rule(self):
        led = FlowerLedger(2, roots=(99,))
        led.add({1, 2, 3, 99}, [(1, 2, 99)], {}, {(1, 2): [(1, 2, 3)]})
        assert led.compatible({3, 4, 5, 99})
        assert not led.compatible({2, 3, 7})
        with pytest.raises(StrategyContractError):
            led.add({1, 3, 8}, [], {}, {})
        assert led.match((1, 2)) == (0, (1, 2, 3))
        assert led.place(0, (1, 2)) is True and led.match((1, 2)) is None
        assert led.check_invariants()


class TestClique:
    def test_multiplicity_sums(self):
        for k in range(4, 12):
            cb = CliqueBuilder(k, 3, 2)
            sums = cb.multiplicity_sums()
            for j in range(cb.j0, 3):
                assert sums[j] == math.comb(cb.ell, 3 - j)

    def test_k6_template_is_four_cycle(self):
        cb = CliqueBuilder(6, 3, 2)
        assert (cb.ell, cb.h) == (2, 4)
        keys = {key for _, key in cb.phase2_template}
        assert keys == {(0, 1), (1, 2), (2, 3), (0, 3)}

    def test_phase1_answers(self):
        n = 50
        Vs = drive(CliqueBuilder(6, 3, 2), n, 2, 3, [(3, 7), (3, 7), (3, 49), (3, 49), (3, 50)], 100)
        assert Vs[0] == (49,) and Vs[1] == (50,)
        assert Vs[2] == (50,)
        for V in (Vs[3], Vs[4]):
            assert not set(V) & {49, 50}

    def test_k_equals_s(self):
        H = build_target(TargetSpec.clique(3, 3))
        assert run(20, 2, 3, CliqueBuilder(3, 3, 2), H, 5).success_step == 1

    def test_k6_success(self):
        wins = success_count(lambda: CliqueBuilder(6, 3, 2), TargetSpec.clique(6, 3), 60, 2, int(3 * 60 ** 1.8), 5)
        assert wins >= 4

    def test_recursive_inner(self):
        cb = CliqueBuilder(9, 3, 2)
        assert cb.ell >= 3 and cb.inner is not None and cb.inner.k == cb.ell

    def test_errors(self):
        with pytest.raises(ParameterError):
            CliqueBuilder(5, 3, 1)


class TestBaseline:
    def test_valid_and_reproducible(self):
        a = run(60, 2, 4, BaselineRandom(), None, 300, seed=5, record_trace=True)
        b = run(60, 2, 4, BaselineRandom(), None, 300, seed=5, record_trace=True)
        assert a.trace == b.trace
        Vs = [V for _, _, V, _ in a.trace]
        assert len(set(Vs)) > 100

    def test_v_uniform_over_complement(self):
        rng = make_rng(2)
        state = GameState(6, 2, 3, MultiHypergraph(3, 6), rng=rng)
        st = BaselineRandom()
        st.start(state, 0)
        counts = np.bincount([st.respond(state, (2, 5))[0] for _ in range(8000)], minlength=7)
        assert counts[2] == counts[5] == 0
        assert all(1800 < counts[v] < 2200 for v in (1, 3, 4, 6))

    @pytest.mark.slow
    def test_k4_rarely_appears_at_t_equals_n(self):
        wins = success_count(BaselineRandom, TargetSpec.clique(4, 3), 2000, 2, 2000, 40)
        assert wins <= 2


def test_registry():
    for name in STRATEGIES:
        spec = {"path_builder": TargetSpec.tight_path(3, 3, 1),
                "loose_cycle_builder": TargetSpec.tight_cycle(3, 5, 1),
                "cycle_three_phase": TargetSpec.tight_cycle(4, 3, 1),
                "cycle_general_x": TargetSpec.tight_cycle(4, 4, 2)}.get(name, TargetSpec.clique(4, 3))
        r = 2
        assert make_strategy(name, spec, r).name == name
    with pytest.raises(ParameterError):
        make_strategy("nope", TargetSpec.clique(4, 3), 2)
    with pytest.raises(ParameterError):
        make_strategy("clique_builder", TargetSpec.tight_path(3, 3, 1), 2)
