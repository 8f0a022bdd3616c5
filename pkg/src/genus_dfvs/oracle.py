"""Exact reference solvers for desk-scale instances.

Everything here is deliberately independent of the approximation pipeline:
cycles are enumerated by backtracking, DFVS is solved by branch and bound,
and the full LP is solved over the complete cycle list.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .costs import INF, Cost, total
from .embedded_digraph import DiCycle, EmbeddedDigraph, VertexId, cyclic_vertices, face_minimal_dicycles
from .simplex import PackingSimplex, UnboundedPacking

DFVS_CAP = 18
PACKING_CAP = 14
EXHAUSTIVE_CAP = 10


class OracleCapError(ValueError):
    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: {size} vertices exceeds the cap of {cap}")
        self.size = size
        self.cap = cap


class OracleInfeasibleError(ValueError):
    """Some dicycle has no finite-cost vertex."""


@dataclass(frozen=True)
class ExactResult:
    optimum: Cost
    solution: FrozenSet[VertexId]
    nodes: int
    method: str


@dataclass(frozen=True)
class FullLpResult:
    primal: Fraction
    dual: Fraction
    x: Dict[VertexId, Fraction]
    cycles: Tuple[DiCycle, ...]
    y: Tuple[Fraction, ...] = field(default=())


def _check_cap(what: str, g: EmbeddedDigraph, cap: int) -> None:
    if len(g) > cap:
        raise OracleCapError(what, len(g), cap)


# -- enumeration -----------------------------------------------------------------


def enumerate_dicycles(g: EmbeddedDigraph, cap: int = DFVS_CAP) -> List[DiCycle]:
    """All simple dicycles, one per vertex sequence up to rotation.

    Each cycle is found from its smallest vertex by a backtracking search over
    larger vertices; parallel arcs are collapsed to the smallest arc id.
    """
    _check_cap("enumerate_dicycles", g, cap)
    succ = {v: sorted(set(g.successors(v))) for v in g.vertices}
    arc_of: Dict[Tuple[VertexId, VertexId], int] = {}
    for a in sorted(g.arcs):
        arc_of.setdefault(tuple(g.arcs[a]), a)
    out: List[DiCycle] = []
    for s in g.vertices:
        path = [s]
        on_path = {s}
        stack = [iter(succ[s])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt == s:
                verts = tuple(path)
                arcs = tuple(arc_of[(verts[k], verts[(k + 1) % len(verts)])] for k in range(len(verts)))
                out.append(DiCycle(verts, arcs))
            elif nxt > s and nxt not in on_path:
                path.append(nxt)
                on_path.add(nxt)
                stack.append(iter(succ[nxt]))
    out.sort(key=lambda c: (len(c), c.vertices))
    return out


# -- exact DFVS ----------------------------------------------------------------------


def _shortest_cycle(succ: Dict[VertexId, List[VertexId]], alive: FrozenSet[VertexId]) -> Optional[Tuple[VertexId, ...]]:
    best = None
    for s in sorted(alive):
        parent = {s: None}
        q = deque([s])
        found = None
        while q and found is None:
            u = q.popleft()
            for v in succ[u]:
                if v not in alive:
                    continue
                if v == s:
                    found = u
                    break
                if v not in parent:
                    parent[v] = u
                    q.append(v)
        if found is None:
            continue
        path = []
        u = found
        while u is not None:
            path.append(u)
            u = parent[u]
        path.reverse()
        if best is None or (len(path), path) < (len(best), best):
            best = path
            if len(best) == 1:
                break
    return tuple(best) if best else None


def _packing_bound(succ, alive, fixed, costs) -> Fraction:
    """Greedy disjoint cycles; each contributes its cheapest deletable vertex."""
    alive = set(alive)
    bound = Fraction(0)
    while True:
        c = _shortest_cycle(succ, frozenset(alive))
        if c is None:
            return bound
        deletable = [costs[v] for v in c if v not in fixed]
        if not deletable:
            return INF
        bound += min(deletable)
        alive.difference_update(c)


def exact_dfvs(g: EmbeddedDigraph, cap: int = DFVS_CAP, use_lp_bound: bool = True) -> ExactResult:
    """Minimum-cost DFVS by branch and bound.

    Branches on the deletable vertices of a shortest dicycle (earlier siblings
    become undeletable); prunes with a greedy packing bound and, when that is
    not enough, the exact LP of the remaining graph.
    """
    _check_cap("exact_dfvs", g, cap)
    from .dfvs_lp import LpInfeasibleError, solve_lp

    verts = frozenset(cyclic_vertices(g))
    succ = {v: list(g.successors(v)) for v in g.vertices}
    costs = {v: g.costs[v] for v in g.vertices}
    fixed0 = frozenset(v for v in verts if costs[v] is INF)
    best_cost: List[Cost] = [INF]
    best_set: List[FrozenSet[VertexId]] = [frozenset()]
    nodes = [0]

    def lp_bound(alive, fixed) -> Cost:
        h = g.induced(alive)
        if fixed:
            h = h.with_costs({v: INF for v in fixed if v in h.costs})
        try:
            return solve_lp(h).objective
        except LpInfeasibleError:
            return INF

    def rec(alive: FrozenSet[VertexId], fixed: FrozenSet[VertexId], chosen: Tuple[VertexId, ...], spent) -> None:
        nodes[0] += 1
        alive = frozenset(cyclic_vertices(g.induced(alive))) if alive else alive
        c = _shortest_cycle(succ, alive)
        if c is None:
            if spent < best_cost[0]:
                best_cost[0] = spent
                best_set[0] = frozenset(chosen)
            return
        lb = _packing_bound(succ, alive, fixed, costs)
        if spent + lb >= best_cost[0]:
            return
        if use_lp_bound and len(alive) > 4 and best_cost[0] is not INF:
            if spent + lp_bound(alive, fixed) >= best_cost[0]:
                return
        deletable = [v for v in c if v not in fixed]
        deletable.sort(key=lambda v: (costs[v], v))
        newly_fixed = fixed
        for v in deletable:
            rec(alive - {v}, newly_fixed, chosen + (v,), spent + costs[v])
            newly_fixed = newly_fixed | {v}

    if _packing_bound(succ, verts, fixed0, costs) is INF:
        raise OracleInfeasibleError("a dicycle consists only of infinite-cost vertices")
    rec(verts, fixed0, (), 0)
    return ExactResult(best_cost[0], best_set[0], nodes[0], "branch-and-bound")


def exhaustive_hitting_set(
    g: EmbeddedDigraph, cycles: Optional[Sequence[DiCycle]] = None, cap: int = EXHAUSTIVE_CAP
) -> ExactResult:
    """Cheapest vertex set meeting every cycle in ``cycles`` (default: all dicycles), by full subset scan.

    Ties go to the set with the smallest sorted vertex tuple.
    """
    _check_cap("exhaustive_hitting_set", g, cap)
    if cycles is None:
        cycles = enumerate_dicycles(g, cap)
    cand = [v for v in g.vertices if g.costs[v] is not INF]
    bit = {v: 1 << k for k, v in enumerate(cand)}
    masks = []
    for c in cycles:
        m = 0
        for v in c.vertices:
            m |= bit.get(v, 0)
        if m == 0:
            raise OracleInfeasibleError(f"cycle {c.vertices} has no finite-cost vertex")
        masks.append(m)
    best = None
    nodes = 0
    for r in range(len(cand) + 1):
        for combo in itertools.combinations(cand, r):
            nodes += 1
            m = 0
            for v in combo:
                m |= bit[v]
            if all(m & cm for cm in masks):
                key = (total(g.costs[v] for v in combo), combo)
                if best is None or key < best:
                    best = key
    return ExactResult(best[0], frozenset(best[1]), nodes, "exhaustive")


def exact_facial_hitting(g: EmbeddedDigraph, cap: int = DFVS_CAP) -> ExactResult:
    """Cheapest set meeting every face-minimal dicycle of ``g`` (static faces)."""
    _check_cap("exact_facial_hitting", g, cap)
    faces = face_minimal_dicycles(g)
    return _hitting_bnb(g, faces, "facial-branch-and-bound")


def _hitting_bnb(g: EmbeddedDigraph, cycles: Sequence[DiCycle], method: str) -> ExactResult:
    sets = [frozenset(c.vertices) for c in cycles]
    best: List = [INF, frozenset()]
    nodes = [0]

    def rec(remaining: List[FrozenSet[VertexId]], fixed: FrozenSet[VertexId], chosen, spent) -> None:
        nodes[0] += 1
        if not remaining:
            if spent < best[0]:
                best[0], best[1] = spent, frozenset(chosen)
            return
        if spent >= best[0]:
            return
        c = min(remaining, key=lambda s: (len(s), sorted(s)))
        opts = sorted((v for v in c if v not in fixed and g.costs[v] is not INF), key=lambda v: (g.costs[v], v))
        fx = fixed
        for v in opts:
            rec([s for s in remaining if v not in s], fx, chosen + (v,), spent + g.costs[v])
            fx = fx | {v}

    rec(sets, frozenset(), (), 0)
    if best[0] is INF and sets:
        raise OracleInfeasibleError("some cycle cannot be hit")
    return ExactResult(best[0], best[1], nodes[0], method)


# -- packing and full LP -----------------------------------------------------------------


def max_dicycle_packing(g: EmbeddedDigraph, cap: int = PACKING_CAP) -> ExactResult:
    """Maximum number of vertex-disjoint dicycles by exact search.

    ``optimum`` is the count and ``solution`` the union of the chosen cycles' vertices.
    """
    _check_cap("max_dicycle_packing", g, cap)
    cycles = enumerate_dicycles(g, cap)
    index = {v: k for k, v in enumerate(g.vertices)}
    masks = []
    for c in cycles:
        m = 0
        for v in c.vertices:
            m |= 1 << index[v]
        masks.append(m)
    by_low: Dict[int, List[int]] = {}
    for m in set(masks):
        low = (m & -m).bit_length() - 1
        by_low.setdefault(low, []).append(m)
    shortest = min((bin(m).count("1") for m in masks), default=1)
    best = [0, 0]
    nodes = [0]

    def rec(free: int, count: int, used: int) -> None:
        nodes[0] += 1
        if count > best[0]:
            best[0], best[1] = count, used
        if count + bin(free).count("1") // shortest <= best[0]:
            return
        # lowest free vertex that still lies on a cycle inside ``free``
        f = free
        while f:
            low = (f & -f).bit_length() - 1
            opts = [m for m in by_low.get(low, ()) if m & free == m]
            if opts:
                break
            f &= f - 1
        else:
            return
        for m in opts:
            rec(free & ~m, count + 1, used | m)
        rec(free & ~(1 << low), count, used)

    rec((1 << len(index)) - 1, 0, 0)
    verts = frozenset(v for v, k in index.items() if best[1] >> k & 1)
    return ExactResult(best[0], verts, nodes[0], "packing-search")


def full_lp(g: EmbeddedDigraph, cap: int = PACKING_CAP) -> FullLpResult:
    """The covering LP with every dicycle as a row, and its packing dual, exactly."""
    _check_cap("full_lp", g, cap)
    cycles = enumerate_dicycles(g, cap)
    rows = [v for v in g.vertices if g.costs[v] is not INF]
    row_of = {v: k for k, v in enumerate(rows)}
    spx = PackingSimplex([Fraction(g.costs[v]) for v in rows])
    for c in cycles:
        spx.add_column([row_of[v] for v in c.vertices if v in row_of])
    try:
        spx.solve()
    except UnboundedPacking as exc:
        raise OracleInfeasibleError(f"cycle {cycles[exc.column].vertices} has no finite-cost vertex") from None
    prices = spx.prices()
    x = {v: Fraction(0) for v in g.vertices}
    for k, v in enumerate(rows):
        x[v] = prices[k]
    y = tuple(spx.primal())
    primal = sum((Fraction(g.costs[v]) * x[v] for v in rows), Fraction(0))
    return FullLpResult(primal, sum(y, Fraction(0)), x, tuple(cycles), y)
