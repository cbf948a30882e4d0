import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netcreate import (
    INFINITE,
    UNREACHABLE,
    GameParams,
    NetworkGraph,
    StrategyProfile,
    all_pairs_distances,
    build_graph,
    make_clique,
    make_random_profile,
    make_star,
    parse_alpha,
    profile_from_json,
    social_cost,
    social_optimum_cost,
    vertex_cost,
)
from netcreate.errors import SchemaError

from conftest import INF, floyd_warshall, oracle_edges, oracle_social_cost, profile


@st.composite
def profiles(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    lists = [draw(st.sets(st.integers(0, n - 1).filter(lambda w, v=v: w != v), max_size=n - 1)) for v in range(n)]
    return StrategyProfile.from_lists(lists)


alphas = st.fractions(min_value=0, max_value=6, max_denominator=8)


class TestParseAlpha:
    @pytest.mark.parametrize("text, value", [("3/2", Fraction(3, 2)), ("2", Fraction(2)), (" 6/4 ", Fraction(3, 2)), (5, Fraction(5))])
    def test_accepts_rationals(self, text, value):
        assert parse_alpha(text) == value

    @pytest.mark.parametrize("text", ["1.5", "1e3", "-1", "1/0", "abc", 1.5])
    def test_rejects(self, text):
        with pytest.raises(SchemaError):
            parse_alpha(text)

    def test_fractional_part_exact(self):
        g = GameParams(3, Fraction(7, 3))
        assert not g.alpha_is_integral
        assert g.alpha_fractional_part == Fraction(1, 3)
        assert GameParams(3, 4).alpha_is_integral


class TestProfile:
    def test_self_purchase_rejected(self):
        with pytest.raises(SchemaError):
            profile({0}, set())

    def test_out_of_range_rejected(self):
        with pytest.raises(SchemaError):
            profile({2}, set())

    def test_double_purchase_representable(self):
        p = profile({1}, {0})
        assert p.double_purchases() == [(0, 1)]
        assert p.num_purchases() == 2

    def test_json_round_trip(self):
        p = make_star(4)
        game, back = profile_from_json(p.to_json("3/2"))
        assert back == p and game.alpha == Fraction(3, 2) and game.n == 4

    @pytest.mark.parametrize(
        "doc",
        [
            {"n": 2, "alpha": "1", "purchases": [[1]]},
            {"n": 2, "alpha": "1", "purchases": [[0], []]},
            {"n": 2, "alpha": "1.5", "purchases": [[1], []]},
            {"n": 3, "alpha": "1", "purchases": [[2, 1], [], []]},
            {"n": 2, "purchases": [[1], []]},
            {"n": 2, "alpha": "1", "purchases": [[1], []], "extra": 1},
        ],
    )
    def test_schema_violations(self, doc):
        with pytest.raises(SchemaError):
            profile_from_json(json.dumps(doc))


class TestBuildGraph:
    def test_empty(self):
        g = build_graph(StrategyProfile.empty(3))
        assert g.n == 3 and g.num_edges() == 0

    def test_duplicate_collapsed(self):
        g = build_graph(profile({1}, {0}))
        assert g.edges() == [(0, 1)]

    def test_star(self):
        g = build_graph(profile({1, 2, 3}, set(), set(), set()))
        assert g.edges() == [(0, 1), (0, 2), (0, 3)]
        assert [g.degree(v) for v in range(4)] == [3, 1, 1, 1]


class TestDistances:
    def test_triangle(self):
        dm = all_pairs_distances(build_graph(make_clique(3)))
        assert all(dm.get(i, j) == (0 if i == j else 1) for i in range(3) for j in range(3))

    def test_path(self):
        dm = all_pairs_distances(NetworkGraph.from_edges(3, [(0, 1), (1, 2)]))
        assert dm.get(0, 2) == 2

    def test_disconnected(self):
        dm = all_pairs_distances(build_graph(StrategyProfile.empty(2)))
        assert dm.get(0, 1) is UNREACHABLE
        assert dm.row_sum(0) is UNREACHABLE and not dm.connected()

    @given(profiles(max_n=8))
    @settings(max_examples=150, deadline=None)
    def test_matches_floyd_warshall_and_metric(self, p):
        dm = all_pairs_distances(build_graph(p))
        ref = floyd_warshall(p.n, oracle_edges(p))
        n = p.n
        for i in range(n):
            for j in range(n):
                got = dm.get(i, j)
                assert (got is UNREACHABLE) == (ref[i][j] == INF)
                if got is not UNREACHABLE:
                    assert got == ref[i][j] == dm.get(j, i)
                    for k in range(n):
                        a, b = dm.get(i, k), dm.get(k, j)
                        if a is not UNREACHABLE and b is not UNREACHABLE:
                            assert got <= a + b


class TestCosts:
    def test_single_vertex(self):
        assert vertex_cost(GameParams(1, 3), StrategyProfile.empty(1), 0) == 0

    def test_star_three(self):
        g, p = GameParams(3, Fraction(5, 2)), make_star(3)
        assert vertex_cost(g, p, 0) == 7
        assert vertex_cost(g, p, 1) == vertex_cost(g, p, 2) == 3
        assert social_cost(g, p).social_cost == 13

    def test_disconnected_infinite(self):
        g, p = GameParams(2, 1), StrategyProfile.empty(2)
        assert vertex_cost(g, p, 0) == INFINITE == vertex_cost(g, p, 1)
        rep = social_cost(g, p)
        assert rep.social_cost == INFINITE and not rep.connected
        assert INFINITE > Fraction(10**9)

    @pytest.mark.parametrize("n", [1, 2, 5, 9])
    def test_clique(self, n):
        a = Fraction(3, 7)
        assert social_cost(GameParams(n, a), make_clique(n)).social_cost == a * n * (n - 1) / 2 + n * (n - 1)

    @given(profiles(), alphas)
    @settings(max_examples=150, deadline=None)
    def test_report_invariants(self, p, a):
        g = GameParams(p.n, a)
        rep = social_cost(g, p)
        assert rep.social_cost == oracle_social_cost(a, p)
        assert rep.connected == (rep.social_cost != INFINITE)
        assert rep.connected == all(vc.distance_sum is not UNREACHABLE for vc in rep.vertices)
        for v, vc in enumerate(rep.vertices):
            assert vc.edge_cost == a * len(p[v])
            assert vc.total == vertex_cost(g, p, v)
        if rep.connected:
            dm = all_pairs_distances(build_graph(p))
            assert rep.social_cost == a * p.num_purchases() + int(dm.table.sum())

    @given(profiles(), alphas, st.data())
    @settings(max_examples=100, deadline=None)
    def test_orientation_reversal(self, p, a, data):
        owned = [(v, w) for v in range(p.n) for w in p[v] if v not in p[w]]
        if not owned:
            return
        v, w = data.draw(st.sampled_from(owned))
        q = p.reversed_purchase(v, w)
        assert build_graph(q) == build_graph(p)
        assert all_pairs_distances(build_graph(q)) == all_pairs_distances(build_graph(p))
        before, after = social_cost(GameParams(p.n, a), p), social_cost(GameParams(p.n, a), q)
        assert before.social_cost == after.social_cost
        assert [x.distance_sum for x in before.vertices] == [x.distance_sum for x in after.vertices]
        assert after.vertices[v].edge_cost == before.vertices[v].edge_cost - a
        assert after.vertices[w].edge_cost == before.vertices[w].edge_cost + a


class TestSocialOptimum:
    def test_star_at_two(self):
        cost, witness = social_optimum_cost(GameParams(6, 2))
        assert cost == 60 and witness == make_star(6)
        assert social_cost(GameParams(6, 2), witness).social_cost == 60

    def test_clique_below_two(self):
        cost, witness = social_optimum_cost(GameParams(4, Fraction(1, 2)))
        assert cost == 15 and witness == make_clique(4)
        assert social_cost(GameParams(4, Fraction(1, 2)), witness).social_cost == 15

    def test_degenerate(self):
        assert social_optimum_cost(GameParams(1, 5))[0] == 0
        cost, witness = social_optimum_cost(GameParams(2, 5))
        assert cost == 7 and build_graph(witness).num_edges() == 1

    @pytest.mark.parametrize("n", [2, 3, 10, 50])
    def test_at_least_two_n_n_minus_1(self, n):
        assert social_optimum_cost(GameParams(n, 3))[0] >= 2 * n * (n - 1)

    @given(st.integers(1, 12), alphas)
    def test_witness_realizes(self, n, a):
        cost, witness = social_optimum_cost(GameParams(n, a))
        assert social_cost(GameParams(n, a), witness).social_cost == cost

    def test_random_profiles_never_beat_optimum(self):
        for seed in range(200):
            p = make_random_profile(6, 0.5, seed)
            for a in (Fraction(1, 2), Fraction(2), Fraction(7, 2)):
                assert social_cost(GameParams(6, a), p).social_cost >= social_optimum_cost(GameParams(6, a))[0]
