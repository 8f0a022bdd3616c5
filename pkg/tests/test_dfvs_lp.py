from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import two_disjoint_triangles, two_triangles_sharing_vertex
from genus_dfvs.costs import INF
from genus_dfvs.dfvs_lp import (
    LpInfeasibleError,
    LpResourceError,
    WeightedDistanceOracle,
    min_weight_dicycle,
    path_weight,
    scale_and_weigh,
    scale_and_weigh_values,
    separate,
    solution_from_values,
    solve_lp,
    violated_cycles,
    weighted_distance,
)
from genus_dfvs.embedded_digraph import Arc, Dart, EmbeddedDigraph
from genus_dfvs.generators import directed_cycle, random_rotation_digraph, toroidal_grid
from genus_dfvs.oracle import enumerate_dicycles, full_lp
from genus_dfvs.simplex import PackingSimplex


def random_map(seed: int, n: int, extra: int, model: str = "uniform-integer") -> EmbeddedDigraph:
    return random_rotation_digraph(n, extra, random.Random(seed), model)


small_maps = st.builds(random_map, st.integers(0, 10**6), st.integers(2, 9), st.integers(0, 7))


def path_graph(n: int) -> EmbeddedDigraph:
    arcs = {k: Arc(k, k + 1) for k in range(n - 1)}
    rot = {v: tuple(d for d in (Dart(v - 1, -1), Dart(v, 1)) if 0 <= d.arc < n - 1) for v in range(n)}
    return EmbeddedDigraph({v: 1 for v in range(n)}, arcs, rot)


# -- separation ------------------------------------------------------------------------


def test_separation_finds_unhit_triangle(triangle):
    c = separate(triangle, {v: F(0) for v in range(3)})
    assert c is not None and c.vertices == (0, 1, 2)


def test_separation_none_when_hit(triangle):
    assert separate(triangle, {0: F(1), 1: F(0), 2: F(0)}) is None


def test_separation_shared_vertex():
    g = two_triangles_sharing_vertex()
    assert separate(g, {v: F(int(v == 0)) for v in g.vertices}) is None


def test_separation_prefers_short_cycle():
    g = toroidal_grid(3)
    c = min_weight_dicycle(g, {})
    assert len(c) == 3
    assert c.vertices == (0, 1, 2)


def test_violated_cycles_are_distinct_and_violated():
    g = toroidal_grid(4)
    cs = violated_cycles(g, {}, limit=5)
    assert 1 <= len(cs) <= 5
    assert len({c.key() for c in cs}) == len(cs)


def test_separation_on_acyclic_graph():
    assert separate(path_graph(4), {}) is None


# -- solve_lp ---------------------------------------------------------------------------


def test_unit_triangle_objective_one(triangle):
    sol = solve_lp(triangle)
    assert sol.objective == 1
    assert sum(sol.x.values()) == 1


def test_two_disjoint_triangles_objective_two():
    assert solve_lp(two_disjoint_triangles()).objective == 2


def test_c3x3_matches_full_lp(c3x3):
    assert solve_lp(c3x3).objective == full_lp(c3x3).primal == 3


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_toroidal_grid_lp_is_n(n):
    assert solve_lp(toroidal_grid(n)).objective == n


def test_acyclic_graph_lp_zero():
    sol = solve_lp(path_graph(3))
    assert sol.objective == 0
    assert set(sol.x.values()) == {0}


def test_infinite_cost_vertices_get_zero():
    g = directed_cycle(3, {0: INF, 1: 4, 2: INF})
    sol = solve_lp(g)
    assert sol.objective == 4
    assert sol.x == {0: 0, 1: 1, 2: 0}


def test_all_infinite_cycle_is_infeasible():
    with pytest.raises(LpInfeasibleError) as info:
        solve_lp(directed_cycle(3, {0: INF, 1: INF, 2: INF}))
    assert info.value.cycle.vertices == (0, 1, 2)


def test_round_cap_raises_with_pool_size():
    with pytest.raises(LpResourceError) as info:
        solve_lp(toroidal_grid(6), max_rounds=1, cuts_per_round=1)
    assert info.value.pool_size >= 1


def test_float_mode_agrees(c3x3):
    sol = solve_lp(c3x3, exact=False)
    assert not sol.exact
    assert math.isclose(sol.objective, 3.0, abs_tol=1e-7)
    assert separate(c3x3, sol.x, tol=1e-7) is None


@settings(max_examples=40, deadline=None)
@given(small_maps)
def test_exact_lp_equals_full_enumeration(g):
    sol = solve_lp(g)
    ref = full_lp(g)
    assert sol.objective == ref.primal == ref.dual
    assert separate(g, sol.x) is None
    assert all(sol.cycle_value(c) >= 1 for c in enumerate_dicycles(g))


@settings(max_examples=25, deadline=None)
@given(small_maps)
def test_float_mode_within_tolerance(g):
    exact = solve_lp(g)
    approx = solve_lp(g, exact=False)
    assert math.isclose(approx.objective, float(exact.objective), rel_tol=1e-7, abs_tol=1e-7)
    assert separate(g, approx.x, tol=1e-7) is None


@settings(max_examples=25, deadline=None)
@given(small_maps)
def test_seeded_pool_gives_same_optimum(g):
    first = solve_lp(g)
    again = solve_lp(g, pool=first.active_cycles)
    assert again.objective == first.objective
    assert again.rounds <= first.rounds


# -- scaling ----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "x, N, w",
    [
        ((F(1, 2), F(1, 2), F(0)), 12, (6, 6, 0)),
        ((F(1), F(0), F(0)), 12, (12, 0, 0)),
        ((F(1, 3), F(1, 3), F(1, 3), F(1, 4)), 12, (4, 4, 4, 3)),
        ((F(1, 5), F(4, 5)), 60, (12, 48)),
    ],
)
def test_scale_and_weigh_examples(x, N, w):
    got_N, got_w = scale_and_weigh_values(dict(enumerate(x)), F(1, 12))
    assert got_N == N
    assert tuple(got_w[k] for k in range(len(x))) == w


@settings(max_examples=30, deadline=None)
@given(small_maps)
def test_scale_makes_eps_n_and_weights_integral(g):
    sol = solve_lp(g)
    N, w = scale_and_weigh(sol)
    assert (N, w) == (sol.N, sol.w)
    assert F(N) * sol.epsilon == sol.eps_n
    assert all(F(w[v]) == N * sol.x[v] for v in g.vertices)


@settings(max_examples=30, deadline=None)
@given(small_maps)
def test_closed_walk_weight_at_least_N(g):
    sol = solve_lp(g)
    for c in enumerate_dicycles(g)[:50]:
        assert sum(sol.w[v] for v in c.vertices) >= sol.N


def test_solution_from_values_checks_feasibility(triangle):
    with pytest.raises(ValueError):
        solution_from_values(triangle, {0: F(1, 2)})
    sol = solution_from_values(triangle, {0: F(1, 3), 1: F(1, 3), 2: F(1, 3)})
    assert sol.objective == 1 and sol.N == 12
    assert [c.vertices for c in sol.active_cycles] == [(0, 1, 2)]


# -- distances ----------------------------------------------------------------------------


def test_distance_to_self_is_zero():
    o = WeightedDistanceOracle(path_graph(3), {0: 5, 1: 5, 2: 5})
    assert weighted_distance(o, [1], [1]) == 0


def test_distance_counts_all_but_last_vertex():
    o = WeightedDistanceOracle(path_graph(3), {0: 2, 1: 3, 2: 5})
    assert weighted_distance(o, [0], [2]) == 5
    assert o.shortest_path([0], [2]) == (0, 1, 2)
    assert path_weight(o.w, (0, 1, 2)) == 5


def test_unreachable_is_infinite():
    o = WeightedDistanceOracle(path_graph(3), {})
    assert weighted_distance(o, [2], [0]) == math.inf
    assert o.shortest_path([2], [0]) is None


def test_forbidden_vertices_block_paths(triangle):
    o = WeightedDistanceOracle(triangle, {0: 1, 1: 1, 2: 1})
    assert weighted_distance(o, [0], [2]) == 2
    assert weighted_distance(o, [0], [2], forbidden=[1]) == math.inf


def _floyd(g: EmbeddedDigraph, w):
    """All-pairs d(u, t) with the weight of the final vertex excluded."""
    d = {(u, v): (0 if u == v else math.inf) for u in g.vertices for v in g.vertices}
    for u in g.vertices:
        for v in g.successors(u):
            if u != v:
                d[u, v] = min(d[u, v], w[u])
    for m, u, v in itertools.product(g.vertices, repeat=3):
        if d[u, m] + d[m, v] < d[u, v]:
            d[u, v] = d[u, m] + d[m, v]
    return d


@settings(max_examples=30, deadline=None)
@given(small_maps, st.randoms(use_true_random=False))
def test_distances_match_floyd_and_compose(g, rnd):
    w = {v: rnd.randint(0, 6) for v in g.vertices}
    o = WeightedDistanceOracle(g, w)
    ref = _floyd(g, w)
    for u in g.vertices:
        fwd = o.distances_from([u])
        for t in g.vertices:
            assert fwd.get(t, math.inf) == ref[u, t]
            assert o.distances_to([t]).get(u, math.inf) == ref[u, t]
            for m in g.vertices:
                assert ref[u, t] <= ref[u, m] + ref[m, t]
            p = o.shortest_path([u], [t])
            if p is not None:
                assert path_weight(w, p) == ref[u, t]


# -- simplex --------------------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(small_maps)
def test_simplex_prices_feasible_and_strong_duality(g):
    cycles = enumerate_dicycles(g)
    if not cycles:
        return
    spx = PackingSimplex([F(g.costs[v]) for v in g.vertices])
    for c in cycles:
        spx.add_column(list(c.vertices))
    spx.solve()
    prices = spx.prices()
    assert all(p >= 0 for p in prices)
    assert all(sum(prices[v] for v in c.vertices) >= 1 for c in cycles)
    y = spx.primal()
    assert all(val >= 0 for val in y)
    for v in g.vertices:
        assert sum(y[k] for k, c in enumerate(cycles) if v in c.vertices) <= g.costs[v]
    assert sum(y) == spx.objective() == sum(F(g.costs[v]) * prices[v] for v in g.vertices)
