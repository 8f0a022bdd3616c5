from __future__ import annotations

import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import bidirected_triangle, dag4, two_disjoint_triangles
from genus_dfvs.costs import INF
from genus_dfvs.embedded_digraph import EmbeddedDigraph, face_minimal_dicycles, is_acyclic
from genus_dfvs.generators import directed_cycle, random_rotation_digraph, toroidal_grid
from genus_dfvs.oracle import (
    OracleCapError,
    OracleInfeasibleError,
    enumerate_dicycles,
    exact_dfvs,
    exact_facial_hitting,
    exhaustive_hitting_set,
    full_lp,
    max_dicycle_packing,
)


def random_map(seed: int, n: int, extra: int) -> EmbeddedDigraph:
    return random_rotation_digraph(n, extra, random.Random(seed), "uniform-integer")


tiny_maps = st.builds(random_map, st.integers(0, 10**6), st.integers(2, 10), st.integers(0, 8))


def brute_force_dfvs(g: EmbeddedDigraph):
    best = None
    for r in range(len(g) + 1):
        for S in itertools.combinations(g.vertices, r):
            if is_acyclic(g, S):
                c = sum(g.costs[v] for v in S)
                best = c if best is None else min(best, c)
    return best


def test_triangle():
    assert exact_dfvs(directed_cycle(3)).optimum == 1
    assert len(enumerate_dicycles(directed_cycle(3))) == 1
    assert max_dicycle_packing(directed_cycle(3)).optimum == 1


def test_bidirected_triangle():
    g = bidirected_triangle()
    cycles = enumerate_dicycles(g)
    assert sorted(len(c) for c in cycles) == [2, 2, 2, 3, 3]
    assert exact_dfvs(g).optimum == 2 == brute_force_dfvs(g)
    assert max_dicycle_packing(g).optimum == 1


def test_dag_has_no_cycles():
    assert enumerate_dicycles(dag4()) == []
    assert exact_dfvs(dag4()).optimum == 0
    assert max_dicycle_packing(dag4()).optimum == 0


def test_two_disjoint_triangles_pack_two():
    assert max_dicycle_packing(two_disjoint_triangles()).optimum == 2


@pytest.mark.parametrize("n, count", [(2, 6), (3, 33), (4, 388)])
def test_toroidal_dicycle_counts(n, count):
    assert len(enumerate_dicycles(toroidal_grid(n))) == count


def test_c3x3_all_methods_agree(c3x3):
    assert exact_dfvs(c3x3).optimum == 3
    assert exhaustive_hitting_set(c3x3).optimum == 3 == brute_force_dfvs(c3x3)
    assert max_dicycle_packing(c3x3).optimum == 3
    assert full_lp(c3x3).primal == 3


def test_torus4_optimum():
    assert exact_dfvs(toroidal_grid(4)).optimum == 4


def test_caps_enforced():
    with pytest.raises(OracleCapError):
        exact_dfvs(toroidal_grid(5), cap=18)
    with pytest.raises(OracleCapError):
        max_dicycle_packing(toroidal_grid(4), cap=14)
    with pytest.raises(OracleCapError):
        exhaustive_hitting_set(toroidal_grid(4), cap=10)


def test_infinite_costs_avoided():
    g = directed_cycle(3, {0: INF, 1: 5, 2: 2})
    res = exact_dfvs(g)
    assert res.optimum == 2 and res.solution == {2}


def test_all_infinite_cycle_raises():
    with pytest.raises(OracleInfeasibleError):
        exact_dfvs(directed_cycle(2, {0: INF, 1: INF}))


def test_facial_hitting_on_bidirected_triangle():
    g = bidirected_triangle()
    res = exact_facial_hitting(g)
    assert res.optimum == 2
    assert all(res.solution & c.vertex_set for c in face_minimal_dicycles(g))


@settings(max_examples=40, deadline=None)
@given(tiny_maps)
def test_cycles_match_networkx(g):
    d = nx.MultiDiGraph()
    d.add_nodes_from(g.vertices)
    d.add_edges_from(g.arcs.values())
    expected = len(list(nx.simple_cycles(d)))
    got = enumerate_dicycles(g)
    assert len(got) == expected
    assert len({c.key() for c in got}) == len(got)


@settings(max_examples=40, deadline=None)
@given(tiny_maps)
def test_two_exact_methods_agree(g):
    a = exact_dfvs(g)
    b = exhaustive_hitting_set(g)
    assert a.optimum == b.optimum
    assert is_acyclic(g, a.solution) and is_acyclic(g, b.solution)
    assert sum(g.costs[v] for v in a.solution) == a.optimum


@settings(max_examples=30, deadline=None)
@given(tiny_maps)
def test_lp_bound_on_or_off_same_optimum(g):
    assert exact_dfvs(g, use_lp_bound=False).optimum == exact_dfvs(g).optimum


@settings(max_examples=40, deadline=None)
@given(tiny_maps)
def test_weak_duality_chain(g):
    unit = g.with_costs({v: 1 for v in g.vertices})
    pack = max_dicycle_packing(unit)
    lp = full_lp(unit)
    opt = exact_dfvs(unit).optimum
    assert pack.optimum <= lp.dual == lp.primal <= opt
    assert bool(pack.solution) == (pack.optimum > 0)
