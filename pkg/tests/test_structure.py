import pytest

from vasslab.errors import ArgumentError, StructuralError
from vasslab.mgts import Mgts, PrecoveringGraph, Update
from vasslab.model import (
    Edge,
    GenConfig,
    InitVass,
    Run,
    Vass,
    dec_letter,
    dyck_alphabet,
    inc_letter,
    simulate,
    nat_domain,
)
from vasslab.structure import (
    covering_sequences,
    cycle_space_dim,
    down_covering,
    fixed_assignment,
    fixed_counters,
    karp_miller,
    rackoff_bound,
    rackoff_cover,
    rank,
    rank_less,
    realization,
)
from vasslab.values import OMEGA

from conftest import dyck_copy_graph, graph_loops, random_precovering
from vasslab.model import parikh_of

A1, AB1 = inc_letter(1), dec_letter(1)


class TestCycleSpace:
    def test_plus_minus_is_one(self):
        assert cycle_space_dim(dyck_copy_graph()) == 1

    def test_single_loop_one_no_edges_zero(self):
        assert cycle_space_dim(graph_loops([(A1, {"y1": 1})], ["y1"], {"y1": 0}, {"y1": 0})) == 1
        g = graph_loops([], ["y1"], {"y1": 0}, {"y1": 0},
                        assignment={"r": {"y1": 0}}, alphabet=dyck_alphabet(1))
        assert cycle_space_dim(g) == 0

    def test_two_independent_loops(self):
        g = graph_loops(
            [(A1, {"c1": 1, "c2": 0}), (inc_letter(2), {"c1": 0, "c2": 1})],
            ["c1", "c2"], {}, {}, alphabet=dyck_alphabet(2),
        )
        assert cycle_space_dim(g) == 2

    def test_not_strongly_connected(self):
        v = Vass(["p", "q"], ("a",), ["c"], [Edge("p", "a", {"c": 0}, "q")])
        base = InitVass(v, GenConfig("p", {"c": 0}), GenConfig("p", {"c": 0}))
        p = PrecoveringGraph(base, {"p": {"c": OMEGA}, "q": {"c": OMEGA}})
        with pytest.raises(StructuralError):
            cycle_space_dim(p)


class TestRank:
    def test_formula(self):
        # entry at index d - i is |E| + |Ω(in)| + |Ω(P)| + |Ω(out)|
        g = dyck_copy_graph()  # 2 edges, Ω(P) = {y1}, finite markings, dim 1
        assert rank(Mgts([g])) == (3, 0)
        g0 = graph_loops(
            [(A1, {"y1": 0}), (AB1, {"y1": 0})], ["y1"], {"y1": 1}, {"y1": 1},
            assignment={"r": {"y1": 1}},
        )  # zero-effect cycles: dim 0, fully concrete
        assert rank(Mgts([g0])) == (0, 2)

    def test_concatenation_is_sum(self):
        g1, g2 = dyck_copy_graph(root="r1"), dyck_copy_graph(root="r2")
        m = Mgts([g1, g2], [Update("", {"y1": 0})])
        assert rank(m) == tuple(a + b for a, b in zip(rank(Mgts([g1])), rank(Mgts([g2]))))

    def test_removing_omega_entry_decreases(self):
        g_omega = dyck_copy_graph(out_y=0)
        g_conc = PrecoveringGraph(
            InitVass(g_omega.vass, g_omega.base.init, GenConfig("r", {"y1": 0})),
            g_omega.assignment,
        )
        higher = PrecoveringGraph(
            InitVass(g_omega.vass, g_omega.base.init, GenConfig("r", {"y1": OMEGA})),
            g_omega.assignment,
        )
        assert rank_less(rank(Mgts([g_conc])), rank(Mgts([higher])))

    def test_lexicographic_most_significant_first(self):
        assert rank_less((0, 99), (1, 0))


class TestCovering:
    def test_plus_loop_pumps(self):
        g = graph_loops([(A1, {"y1": 1})], ["y1"], {"y1": 0}, {"y1": 0})
        assert covering_sequences(g) == (0,)

    def test_minus_loop_cannot(self):
        g = graph_loops([(AB1, {"y1": -1})], ["y1"], {"y1": 0}, {"y1": 0})
        assert covering_sequences(g) is None

    def test_omega_in_counter_may_decrease(self):
        g = graph_loops(
            [(A1, {"c1": 1, "c2": -1})], ["c1", "c2"],
            {"c1": 0, "c2": OMEGA}, {"c1": 0, "c2": OMEGA},
        )
        assert covering_sequences(g) == (0,)

    def test_down_is_reverse_of_up_on_reverse(self):
        g = dyck_copy_graph()
        down = down_covering(g)
        up_rev = covering_sequences(g.reverse())
        assert down == tuple(reversed(up_rev))
        # and the down witness pumps the reversed graph up
        assert up_rev is not None

    def test_witness_verifies(self, rng):
        for _ in range(40):
            p = random_precovering(rng, max_nodes=3, n_counters=2, max_upd=2)
            sigma = covering_sequences(p)
            if sigma is None or sigma == ():
                continue
            pump = sorted(p.omega_counters - frozenset(
                c for c in p.vass.counters if p.in_marking[c] is OMEGA))
            seed = 40
            start = {c: (seed if p.in_marking[c] is OMEGA else p.in_marking[c])
                     for c in p.vass.counters}
            out = simulate(p.vass, GenConfig(p.root, start), sigma, nat_domain(p.vass))
            assert isinstance(out, Run)
            final = out.final_config(p.vass)
            assert final.node == p.root
            for c in pump:
                assert final.valuation[c] > start[c]


class TestFixedCounters:
    def test_pm_loop_not_fixed(self):
        assert "y1" not in fixed_counters(dyck_copy_graph())

    def test_untouched_counter_fixed(self):
        g = graph_loops([(A1, {"c1": 1, "c2": 0})], ["c1", "c2"],
                        {"c1": 0, "c2": 2}, {"c1": 0, "c2": 2},
                        assignment={"r": {"c1": OMEGA, "c2": 2}})
        assert "c2" in fixed_counters(g)
        assert fixed_assignment(g, "c2") == {"r": 2}

    def test_two_node_cycle_potential(self):
        v = Vass(["p", "q"], ("a",), ["j"],
                 [Edge("p", "a", {"j": 1}, "q"), Edge("q", "a", {"j": -1}, "p")])
        base = InitVass(v, GenConfig("p", {"j": 0}), GenConfig("p", {"j": 0}))
        g = PrecoveringGraph(base, {"p": {"j": OMEGA}, "q": {"j": OMEGA}})
        assert "j" in fixed_counters(g)
        assert fixed_assignment(g, "j") == {"p": 0, "q": 1}

    def test_not_fixed_is_argument_error(self):
        with pytest.raises(ArgumentError):
            fixed_assignment(dyck_copy_graph(), "y1")


class TestRealization:
    def two_cycle(self):
        return Vass(["p", "q"], ("a",), ["c"],
                    [Edge("p", "a", {"c": 0}, "q"), Edge("q", "a", {"c": 0}, "p")])

    def test_simple(self):
        assert realization(self.two_cycle(), {0: 1, 1: 1}, "p") == (0, 1)

    def test_double(self):
        assert realization(self.two_cycle(), {0: 2, 1: 2}, "p") == (0, 1, 0, 1)

    def test_self_loop(self):
        v = Vass(["p"], ("a",), ["c"], [Edge("p", "a", {"c": 0}, "p")])
        assert realization(v, {0: 3}, "p") == (0, 0, 0)

    def test_parikh_and_closure(self, rng):
        v = Vass(
            ["p", "q"], ("a",), ["c"],
            [Edge("p", "a", {"c": 1}, "q"), Edge("q", "a", {"c": -1}, "p"),
             Edge("p", "a", {"c": 0}, "p")],
        )
        for _ in range(20):
            k1, k2 = rng.randint(1, 3), rng.randint(0, 3)
            parikh = {0: k1, 1: k1, 2: k2}
            cyc = realization(v, parikh, "p")
            assert parikh_of(cyc) == {i: k for i, k in parikh.items() if k}
            node = "p"
            for i in cyc:
                assert v.edges[i].src == node
                node = v.edges[i].dst
            assert node == "p"

    def test_unbalanced_rejected(self):
        with pytest.raises(ArgumentError):
            realization(self.two_cycle(), {0: 2, 1: 1}, "p")

    def test_disconnected_rejected(self):
        v = Vass(["p", "q"], ("a",), ["c"],
                 [Edge("p", "a", {"c": 0}, "p"), Edge("q", "a", {"c": 0}, "q")])
        with pytest.raises(ArgumentError):
            realization(v, {0: 1, 1: 1}, "p")


class TestRackoff:
    def test_formula(self):
        v = Vass(["p", "q"], ("a",), ["j"],
                 [Edge("p", "a", {"j": 1}, "q"), Edge("q", "a", {"j": -1}, "p")])
        base = InitVass(v, GenConfig("p", {"j": 0}), GenConfig("p", {"j": 0}))
        g = PrecoveringGraph(base, {"p": {"j": OMEGA}, "q": {"j": OMEGA}})
        assert rackoff_bound(g, ["j"], C=2) == 16  # (2*1*2)^{2!}

    def test_empty_jprime(self):
        g = dyck_copy_graph()
        assert rackoff_bound(g, [], C=3) == 3  # (1*1*3)^{1!}
        assert rackoff_bound(g, [], C=3, exponent_mode="literal") == 3

    def test_literal_mode(self):
        g = dyck_copy_graph()
        assert rackoff_bound(g, ["y1"], C=2, exponent_mode="literal") == 4  # 2^2
        assert rackoff_bound(g, ["y1"], C=2) == 4  # 2^(2!) coincides here

    def test_cover_pumps(self):
        g = graph_loops([(A1, {"y1": 1})], ["y1"], {"y1": 0}, {"y1": 0})
        run = Run(GenConfig("r", {"y1": 0}), ())
        cover = rackoff_cover(g, run, ["y1"], C=3)
        assert cover == (0, 0, 0)


def test_nested_pumping_found():
    # pumping the second counter needs the first one pumped up beforehand
    g = graph_loops(
        [(A1, {"c1": 1, "c2": 0}), (AB1, {"c1": -1, "c2": 1})],
        ["c1", "c2"], {"c1": 0, "c2": 0}, {"c1": 0, "c2": 0},
        alphabet=dyck_alphabet(1),
    )
    sigma = covering_sequences(g)
    assert sigma is not None and sigma != ()
    seed = 100
    start = {"c1": 0, "c2": 0}
    out = simulate(g.vass, GenConfig(g.root, start), sigma, nat_domain(g.vass))
    assert isinstance(out, Run)
    final = out.final_config(g.vass).valuation
    assert final["c1"] >= 1 and final["c2"] >= 1


def test_mutual_exclusion_not_pumpable():
    # each loop trades one counter for the other (the sum is invariant), so no
    # run raises both strictly even though each moves individually
    g = graph_loops(
        [(A1, {"c1": 1, "c2": -1}), (AB1, {"c1": -1, "c2": 1})],
        ["c1", "c2"], {"c1": 1, "c2": 1}, {"c1": 1, "c2": 1},
        alphabet=dyck_alphabet(1),
    )
    assert covering_sequences(g) is None


def test_karp_miller_accelerates():
    g = graph_loops([(A1, {"y1": 1})], ["y1"], {"y1": 0}, {"y1": 0})
    tree = karp_miller(g.vass, g.root, g.in_marking)
    assert any(n.valuation == (OMEGA,) for n in tree.nodes)
    assert "digraph" in tree.to_dot()
