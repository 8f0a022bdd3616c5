"""The covering LP for DFVS, solved by cutting planes.

``min c.x  s.t.  x(C) >= 1 for every dicycle C,  x >= 0``. The cycle pool starts
from a few short cycles and grows by minimum-weight dicycle separation until
no violated cycle remains. Exact mode works over the rationals (warm-started
packing simplex); float mode calls HiGHS through scipy.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .costs import INF
from .embedded_digraph import DiCycle, EmbeddedDigraph, VertexId, cyclic_vertices, scc
from .simplex import PackingSimplex, UnboundedPacking

Number = Union[Fraction, float]

DEFAULT_EPSILON = Fraction(1, 12)
FLOAT_TOL = 1e-9
RATIONALIZE_BOUND = 10**6


class LpResourceError(RuntimeError):
    def __init__(self, pool_size: int, rounds: int):
        super().__init__(f"cutting-plane loop hit its round cap ({rounds}) with {pool_size} cycles in the pool")
        self.pool_size = pool_size


class LpInfeasibleError(ValueError):
    def __init__(self, cycle: DiCycle):
        super().__init__(f"dicycle {cycle.vertices} has only infinite-cost vertices")
        self.cycle = cycle


@dataclass(frozen=True)
class LpSolution:
    x: Dict[VertexId, Number]
    objective: Number
    active_cycles: Tuple[DiCycle, ...]
    duals: Tuple[Number, ...] = ()
    N: int = 1
    w: Dict[VertexId, int] = field(default_factory=dict)
    epsilon: Fraction = DEFAULT_EPSILON
    exact: bool = True
    rounds: int = 0

    def cycle_value(self, c: DiCycle) -> Number:
        return sum((self.x.get(v, 0) for v in c.vertices), Fraction(0) if self.exact else 0.0)

    @property
    def eps_n(self) -> int:
        return int(self.epsilon * self.N)


# -- separation ---------------------------------------------------------------


def _cycle_candidates(g: EmbeddedDigraph, x: Mapping[VertexId, Number]) -> List[Tuple[Number, int, tuple, DiCycle]]:
    """Minimum-x dicycle through each closing arc, grouped by source vertex.

    For every vertex ``v`` run Dijkstra from ``v`` (vertex weights, both ends
    counted) inside its strong component, then close each arc ``u -> v``.
    Ties: fewer vertices, then lexicographically smaller path.
    """
    zero = Fraction(0) if not any(isinstance(val, float) for val in x.values()) else 0.0
    comp_of = {}
    for k, comp in enumerate(scc(g)):
        for v in comp:
            comp_of[v] = k
    out = []
    for v in g.vertices:
        closing = [a for a in g.in_arcs(v) if comp_of[g.arcs[a].tail] == comp_of[v]]
        if not closing:
            continue
        xv = x.get(v, zero)
        best: Dict[VertexId, tuple] = {v: (xv, 1, (v,))}
        heap = [(xv, 1, (v,))]
        done = set()
        while heap:
            d, hops, path = heapq.heappop(heap)
            u = path[-1]
            if u in done:
                continue
            done.add(u)
            for a in g.out_arcs(u):
                h = g.arcs[a].head
                if h in done or h == v or comp_of[h] != comp_of[v]:
                    continue
                key = (d + x.get(h, zero), hops + 1, path + (h,))
                if h not in best or key < best[h]:
                    best[h] = key
                    heapq.heappush(heap, key)
        by_tail: Dict[VertexId, int] = {}
        for a in closing:
            t = g.arcs[a].tail
            if t in best and (t not in by_tail or a < by_tail[t]):
                by_tail[t] = a
        for t, a in by_tail.items():
            d, hops, path = best[t]
            arcs = []
            for k in range(len(path) - 1):
                arcs.append(min(b for b in g.out_arcs(path[k]) if g.arcs[b].head == path[k + 1]))
            arcs.append(a)
            c = DiCycle(path, tuple(arcs))
            out.append((d, len(path), c.key(), c))
    return out


def violated_cycles(
    g: EmbeddedDigraph, x: Mapping[VertexId, Number], limit: Optional[int] = None, tol: float = 0.0
) -> List[DiCycle]:
    """Distinct dicycles with ``x(C) < 1 - tol``, most violated first."""
    seen = {}
    for d, n, key, c in _cycle_candidates(g, x):
        if d < 1 - tol and (key not in seen or (d, n) < seen[key][:2]):
            seen[key] = (d, n, c)
    ranked = sorted(seen.items(), key=lambda kv: (kv[1][0], kv[1][1], kv[0]))
    cycles = [c.canonical() for _k, (_d, _n, c) in ranked]
    return cycles if limit is None else cycles[:limit]


def min_weight_dicycle(g: EmbeddedDigraph, x: Mapping[VertexId, Number]) -> Optional[DiCycle]:
    """A dicycle minimising ``x(C)`` (ties: fewest vertices, then lexicographic)."""
    cands = _cycle_candidates(g, x)
    if not cands:
        return None
    d, n, key, c = min(cands, key=lambda t: t[:3])
    return c.canonical()


def separate(g: EmbeddedDigraph, x: Mapping[VertexId, Number], tol: float = 0.0) -> Optional[DiCycle]:
    """Most violated dicycle, or ``None`` when every dicycle has ``x(C) >= 1 - tol``."""
    c = min_weight_dicycle(g, x)
    if c is None:
        return None
    value = sum((x.get(v, 0) for v in c.vertices), 0)
    return c if value < 1 - tol else None


# -- LP -------------------------------------------------------------------------


def _finite_rows(g: EmbeddedDigraph, verts: Iterable[VertexId]) -> List[VertexId]:
    return [v for v in verts if g.costs[v] is not INF]


def _pool_ok(g: EmbeddedDigraph, c: DiCycle) -> bool:
    n = len(c.vertices)
    for k, a in enumerate(c.arcs):
        arc = g.arcs.get(a)
        if arc is None or arc != (c.vertices[k], c.vertices[(k + 1) % n]):
            return False
    return True


def solve_lp(
    g: EmbeddedDigraph,
    *,
    exact: bool = True,
    epsilon: Fraction = DEFAULT_EPSILON,
    pool: Sequence[DiCycle] = (),
    cuts_per_round: int = 12,
    max_rounds: int = 2000,
) -> LpSolution:
    """Optimal fractional DFVS by cutting planes.

    ``pool`` seeds the constraint pool; cycles no longer present in ``g`` are
    dropped. The returned solution carries the integer scaling ``N`` and the
    weights ``w = N x`` used by the separator.
    """
    epsilon = Fraction(epsilon)
    cyc = cyclic_vertices(g)
    if not cyc:
        zero = Fraction(0) if exact else 0.0
        N, w = scale_and_weigh_values({}, epsilon)
        return LpSolution({v: zero for v in g.costs}, zero, (), (), N, w, epsilon, exact, 0)
    h = g.induced(cyc)
    cycles: List[DiCycle] = []
    keys = set()

    def add(c: DiCycle) -> bool:
        k = c.key()
        if k in keys:
            return False
        keys.add(k)
        cycles.append(c)
        return True

    for c in pool:
        if _pool_ok(h, c):
            add(c.canonical())
    if not cycles:
        for c in violated_cycles(h, {}, limit=cuts_per_round):
            add(c)
    if exact:
        x, obj, duals, rounds = _exact_loop(h, cycles, add, cuts_per_round, max_rounds)
    else:
        x, obj, duals, rounds = _float_loop(h, cycles, add, cuts_per_round, max_rounds)
    zero = Fraction(0) if exact else 0.0
    full_x = {v: x.get(v, zero) for v in g.costs}
    if exact:
        N, w = scale_and_weigh_values(full_x, epsilon)
    else:
        N, w = scale_and_weigh_values(_rationalize(full_x), epsilon)
    return LpSolution(full_x, obj, tuple(cycles), tuple(duals), N, w, epsilon, exact, rounds)


def _exact_loop(h, cycles, add, cuts_per_round, max_rounds):
    rows = _finite_rows(h, h.vertices)
    row_of = {v: i for i, v in enumerate(rows)}
    spx = PackingSimplex([Fraction(h.costs[v]) for v in rows])

    def push(c: DiCycle) -> None:
        spx.add_column([row_of[v] for v in c.vertices if v in row_of])

    for c in cycles:
        push(c)
    for rounds in range(1, max_rounds + 1):
        try:
            spx.solve()
        except UnboundedPacking as exc:
            raise LpInfeasibleError(cycles[exc.column]) from None
        prices = spx.prices()
        x = {v: prices[i] for i, v in enumerate(rows)}
        new = [c for c in violated_cycles(h, x, limit=cuts_per_round) if add(c)]
        if not new:
            return x, spx.objective(), spx.primal(), rounds
        for c in new:
            push(c)
    raise LpResourceError(len(cycles), max_rounds)


def _float_loop(h, cycles, add, cuts_per_round, max_rounds):
    import numpy as np
    from scipy.optimize import linprog

    verts = h.vertices
    col = {v: i for i, v in enumerate(verts)}
    cost = np.array([0.0 if h.costs[v] is INF else float(h.costs[v]) for v in verts])
    bounds = [(0, 0) if h.costs[v] is INF else (0, None) for v in verts]
    for rounds in range(1, max_rounds + 1):
        A = np.zeros((len(cycles), len(verts)))
        for r, c in enumerate(cycles):
            for v in c.vertices:
                A[r, col[v]] = 1.0
        res = linprog(cost, A_ub=-A, b_ub=-np.ones(len(cycles)), bounds=bounds, method="highs")
        if res.status == 2:
            bad = next(c for c in cycles if all(h.costs[v] is INF for v in c.vertices))
            raise LpInfeasibleError(bad)
        if res.status != 0:
            raise RuntimeError(f"HiGHS failed: {res.message}")
        x = {v: max(0.0, float(res.x[col[v]])) for v in verts}
        new = [c for c in violated_cycles(h, x, limit=cuts_per_round, tol=FLOAT_TOL) if add(c)]
        if not new:
            duals = tuple(float(-m) for m in res.ineqlin.marginals)
            return x, float(res.fun), duals, rounds
    raise LpResourceError(len(cycles), max_rounds)


def solution_from_values(
    g: EmbeddedDigraph, x: Mapping[VertexId, Fraction], epsilon: Fraction = DEFAULT_EPSILON
) -> LpSolution:
    """Wrap given feasible values as an :class:`LpSolution`.

    Useful for feeding a chosen (not necessarily extreme) optimum to the
    separator. The pool holds the dicycles through each arc that are binding
    under ``x``. Optimality is the caller's responsibility; feasibility is checked.
    """
    x = {v: Fraction(x.get(v, 0)) for v in g.costs}
    if any(val < 0 for val in x.values()):
        raise ValueError("negative LP value")
    c = separate(g, x)
    if c is not None:
        raise ValueError(f"values violate dicycle {c.vertices}")
    pool = {}
    for d, _n, key, cyc in _cycle_candidates(g, x):
        if d == 1:
            pool.setdefault(key, cyc.canonical())
    obj = sum((Fraction(g.costs[v]) * val for v, val in x.items() if val), Fraction(0))
    N, w = scale_and_weigh_values(x, epsilon)
    cycles = tuple(pool[k] for k in sorted(pool))
    return LpSolution(x, obj, cycles, (), N, w, Fraction(epsilon), True, 0)


# -- scaling ----------------------------------------------------------------------


def _rationalize(x: Mapping[VertexId, float]) -> Dict[VertexId, Fraction]:
    return {v: Fraction(val).limit_denominator(RATIONALIZE_BOUND) for v, val in x.items()}


def scale_and_weigh_values(
    x: Mapping[VertexId, Fraction], epsilon: Fraction = DEFAULT_EPSILON
) -> Tuple[int, Dict[VertexId, int]]:
    """Smallest ``N`` with ``N x`` and ``epsilon N`` integral, and the weights ``N x``."""
    epsilon = Fraction(epsilon)
    N = epsilon.denominator
    for val in x.values():
        N = math.lcm(N, Fraction(val).denominator)
    w = {v: int(Fraction(val) * N) for v, val in x.items()}
    return N, w


def scale_and_weigh(sol: LpSolution, epsilon: Optional[Fraction] = None) -> Tuple[int, Dict[VertexId, int]]:
    eps = sol.epsilon if epsilon is None else Fraction(epsilon)
    x = sol.x if sol.exact else _rationalize(sol.x)
    return scale_and_weigh_values(x, eps)


# -- weighted distances ------------------------------------------------------------


class WeightedDistanceOracle:
    """Path weight = sum of vertex weights along the path, final vertex excluded."""

    def __init__(self, graph: EmbeddedDigraph, w: Mapping[VertexId, int]):
        self.graph = graph
        self.w = w

    def weight(self, v: VertexId) -> int:
        return self.w.get(v, 0)

    def distances_from(self, sources: Iterable[VertexId], forbidden: Iterable[VertexId] = ()) -> Dict[VertexId, int]:
        g = self.graph
        forbidden = set(forbidden)
        dist: Dict[VertexId, int] = {}
        heap = [(0, s) for s in sorted(set(sources)) if s in g.costs and s not in forbidden]
        heapq.heapify(heap)
        while heap:
            d, u = heapq.heappop(heap)
            if u in dist:
                continue
            dist[u] = d
            nd = d + self.weight(u)
            for v in g.successors(u):
                if v not in dist and v not in forbidden:
                    heapq.heappush(heap, (nd, v))
        return dist

    def distances_to(self, targets: Iterable[VertexId], forbidden: Iterable[VertexId] = ()) -> Dict[VertexId, int]:
        """``d(v, targets)`` for every ``v`` that can reach a target."""
        g = self.graph
        forbidden = set(forbidden)
        dist: Dict[VertexId, int] = {}
        heap = [(0, t) for t in sorted(set(targets)) if t in g.costs and t not in forbidden]
        heapq.heapify(heap)
        while heap:
            d, u = heapq.heappop(heap)
            if u in dist:
                continue
            dist[u] = d
            for p in g.predecessors(u):
                if p not in dist and p not in forbidden:
                    heapq.heappush(heap, (d + self.weight(p), p))
        return dist

    def distance(self, S: Iterable[VertexId], T: Iterable[VertexId], forbidden: Iterable[VertexId] = ()):
        T = set(T)
        dist = self.distances_from(S, forbidden)
        return min((dist[t] for t in T if t in dist), default=math.inf)

    def shortest_path(
        self, S: Iterable[VertexId], T: Iterable[VertexId], forbidden: Iterable[VertexId] = ()
    ) -> Optional[Tuple[VertexId, ...]]:
        """Minimum-weight path from ``S`` to ``T``; ties by length then lexicographic order."""
        g = self.graph
        forbidden = set(forbidden)
        T = set(T)
        best: Dict[VertexId, tuple] = {}
        heap = []
        for s in sorted(set(S)):
            if s in g.costs and s not in forbidden:
                key = (0, 1, (s,))
                best[s] = key
                heap.append(key)
        heapq.heapify(heap)
        done = set()
        while heap:
            d, hops, path = heapq.heappop(heap)
            u = path[-1]
            if u in done:
                continue
            done.add(u)
            nd = d + self.weight(u)
            for v in g.successors(u):
                if v in done or v in forbidden:
                    continue
                key = (nd, hops + 1, path + (v,))
                if v not in best or key < best[v]:
                    best[v] = key
                    heapq.heappush(heap, key)
        hits = [best[t] for t in T if t in best]
        return min(hits)[2] if hits else None


def path_weight(w: Mapping[VertexId, int], path: Sequence[VertexId]) -> int:
    return sum(w.get(v, 0) for v in path[:-1])


def weighted_distance(
    oracle: WeightedDistanceOracle,
    S: Iterable[VertexId],
    T: Iterable[VertexId],
    forbidden: Iterable[VertexId] = (),
):
    """``min d(u, t)`` over ``u`` in ``S``, ``t`` in ``T`` avoiding ``forbidden``; ``inf`` if unreachable."""
    return oracle.distance(S, T, forbidden)
