"""Separator step for maps without directed faces.

After heavy rounding every LP value is small, so a tight dicycle ``C1`` has
many vertices and short weighted paths cannot close up into cycles. Arcs
leaving or entering ``C1`` are subdivided into infinite-cost port vertices,
sorted by side and direction:

* ``U``: out-arcs on the left, ``W``: in-arcs on the right,
* ``B``: in-arcs on the left, ``D``: out-arcs on the right.

Depending on how close the ports are in weighted distance, :func:`plan`
removes a union of cheap distance layers (FAR) or cuts around three short
witness paths (CLOSE).
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .costs import INF, total
from .dfvs_lp import DEFAULT_EPSILON, LpSolution, WeightedDistanceOracle, path_weight, solve_lp
from .embedded_digraph import (
    Arc,
    Dart,
    DiCycle,
    EmbeddedDigraph,
    Side,
    VertexId,
    classify_sides,
    residual_graph,
    scc,
)

HEAVY_THRESHOLD = Fraction(1, 24)


class TopologyAssertionError(AssertionError):
    """A separator post-condition failed on this instance."""


class WitnessError(RuntimeError):
    """Reach sets promised a short port-to-port path that could not be found."""


class Branch(str, enum.Enum):
    FAR = "FAR"
    CLOSE = "CLOSE"


# -- heavy rounding ---------------------------------------------------------------


@dataclass(frozen=True)
class HeavyResult:
    F: Tuple[VertexId, ...]
    solution: LpSolution
    graph: EmbeddedDigraph
    root_lp: Fraction
    cost: Fraction
    threshold: Fraction
    resolves: int

    @property
    def within_bound(self) -> bool:
        return self.cost <= self.root_lp / self.threshold


def round_heavy(
    g: EmbeddedDigraph,
    threshold: Fraction = HEAVY_THRESHOLD,
    epsilon: Fraction = DEFAULT_EPSILON,
    exact: bool = True,
) -> HeavyResult:
    """Move the largest LP vertex into ``F`` and re-solve until every value is below ``threshold``.

    Returns the final residual map and its LP solution alongside ``F``.
    """
    threshold = Fraction(threshold)
    F: List[VertexId] = []
    h = residual_graph(g)
    sol = solve_lp(h, exact=exact, epsilon=epsilon)
    root = Fraction(sol.objective) if exact else Fraction(sol.objective).limit_denominator(10**6)
    resolves = 1
    while True:
        heavy = [(val, v) for v, val in sol.x.items() if val >= threshold and v in h.costs]
        if not heavy or not len(h):
            break
        _val, v = max(heavy, key=lambda t: (t[0], -t[1]))
        F.append(v)
        h = residual_graph(h, [v])
        sol = solve_lp(h, exact=exact, epsilon=epsilon, pool=sol.active_cycles)
        resolves += 1
    cost = Fraction(total(g.costs[v] for v in F))
    return HeavyResult(tuple(F), sol, h, root, cost, threshold, resolves)


def tight_cycle(g: EmbeddedDigraph, sol: LpSolution, tol: float = 1e-7) -> Optional[DiCycle]:
    """A pool cycle with ``x(C) = 1``: fewest vertices, then lexicographic. ``None`` when acyclic."""
    best = None
    for c in sol.active_cycles:
        if any(v not in g.costs for v in c.vertices):
            continue
        val = sol.cycle_value(c)
        binding = val == 1 if sol.exact else abs(val - 1) <= tol
        if binding:
            key = (len(c), c.key())
            if best is None or key < best[0]:
                best = (key, c)
    return None if best is None else best[1].canonical()


# -- ports -------------------------------------------------------------------------


PORT_KINDS = ("U", "W", "B", "D")


@dataclass(frozen=True)
class Port:
    vertex: VertexId
    kind: str
    position: int
    arc: int


@dataclass(frozen=True)
class BoundaryPorts:
    cycle: DiCycle
    graph: EmbeddedDigraph
    ports: Tuple[Port, ...]

    def of_kind(self, kind: str, positions: Optional[Iterable[int]] = None) -> List[VertexId]:
        pos = None if positions is None else set(positions)
        return [p.vertex for p in self.ports if p.kind == kind and (pos is None or p.position in pos)]

    @property
    def U(self) -> List[VertexId]:
        return self.of_kind("U")

    @property
    def W(self) -> List[VertexId]:
        return self.of_kind("W")

    @property
    def B(self) -> List[VertexId]:
        return self.of_kind("B")

    @property
    def D(self) -> List[VertexId]:
        return self.of_kind("D")

    @property
    def vertex_set(self) -> FrozenSet[VertexId]:
        return frozenset(p.vertex for p in self.ports)

    def by_vertex(self) -> Dict[VertexId, Port]:
        return {p.vertex: p for p in self.ports}


def build_ports(g: EmbeddedDigraph, c1: DiCycle) -> BoundaryPorts:
    """Subdivide every non-cycle arc at each of its ends that lies on ``c1``.

    The arc keeps its id on the cycle side; new vertices and arcs get fresh ids
    above the current maximum. Ports have infinite cost.
    """
    sides = classify_sides(g, c1)
    pos = {v: k for k, v in enumerate(c1.vertices)}
    cycle_arcs = set(c1.arcs)
    costs = dict(g.costs)
    arcs: Dict[int, Arc] = dict(g.arcs)
    rotation: Dict[VertexId, List[Dart]] = {v: list(r) for v, r in g.rotation.items()}
    next_v = max(g.costs) + 1
    next_a = max(g.arcs) + 1
    ports: List[Port] = []

    def replace(v: VertexId, old: Dart, new: Dart) -> None:
        rot = rotation[v]
        rot[rot.index(old)] = new

    for a in sorted(g.arcs):
        if a in cycle_arcs:
            continue
        t, h = g.arcs[a]
        if t not in pos and h not in pos:
            continue
        if t in pos and h in pos:
            # chord or loop: out-port at the tail, in-port at the head
            p, q = next_v, next_v + 1
            next_v += 2
            a_mid, a_in = next_a, next_a + 1
            next_a += 2
            arcs[a] = Arc(t, p)
            arcs[a_mid] = Arc(p, q)
            arcs[a_in] = Arc(q, h)
            replace(h, Dart(a, -1), Dart(a_in, -1))
            rotation[p] = [Dart(a, -1), Dart(a_mid, +1)]
            rotation[q] = [Dart(a_mid, -1), Dart(a_in, +1)]
            costs[p] = costs[q] = INF
            ports.append(Port(p, "U" if sides[Dart(a, +1)] is Side.LEFT else "D", pos[t], a))
            ports.append(Port(q, "W" if sides[Dart(a, -1)] is Side.RIGHT else "B", pos[h], a))
        elif t in pos:
            p = next_v
            next_v += 1
            a_out = next_a
            next_a += 1
            arcs[a] = Arc(t, p)
            arcs[a_out] = Arc(p, h)
            replace(h, Dart(a, -1), Dart(a_out, -1))
            rotation[p] = [Dart(a, -1), Dart(a_out, +1)]
            costs[p] = INF
            ports.append(Port(p, "U" if sides[Dart(a, +1)] is Side.LEFT else "D", pos[t], a))
        else:
            q = next_v
            next_v += 1
            a_far = next_a
            next_a += 1
            arcs[a] = Arc(q, h)
            arcs[a_far] = Arc(t, q)
            replace(t, Dart(a, +1), Dart(a_far, +1))
            rotation[q] = [Dart(a_far, -1), Dart(a, +1)]
            costs[q] = INF
            ports.append(Port(q, "W" if sides[Dart(a, -1)] is Side.RIGHT else "B", pos[h], a))
    ported = EmbeddedDigraph(costs, arcs, {v: tuple(r) for v, r in rotation.items()})
    return BoundaryPorts(c1, ported, tuple(ports))


# -- reach sets ----------------------------------------------------------------------


@dataclass(frozen=True)
class ReachSets:
    tau_minus: FrozenSet[int]
    tau_plus: FrozenSet[int]
    kappa_minus: FrozenSet[int]
    kappa_plus: FrozenSet[int]


def _reach(o: WeightedDistanceOracle, ports: BoundaryPorts, src: str, dst: str, eps_n: int):
    cyc = ports.cycle.vertices
    info = ports.by_vertex()
    targets = set(ports.of_kind(dst))
    minus, plus = set(), set()
    for s in ports.of_kind(src):
        dist = o.distances_from([s], forbidden=cyc)
        for t in targets:
            if t in dist and dist[t] < eps_n:
                minus.add(info[t].position)
                plus.add(info[s].position)
    return frozenset(minus), frozenset(plus)


def port_reach_sets(ports: BoundaryPorts, w: Mapping[VertexId, int], eps_n: int) -> ReachSets:
    """Cycle positions joined by a port-to-port path of weight ``< eps_n`` avoiding the cycle."""
    o = WeightedDistanceOracle(ports.graph, w)
    tm, tp = _reach(o, ports, "U", "W", eps_n)
    km, kp = _reach(o, ports, "D", "B", eps_n)
    return ReachSets(tm, tp, km, kp)


# -- layers -------------------------------------------------------------------------


@dataclass(frozen=True)
class LayerAudit:
    family: str
    chosen_index: int
    chosen_cost: Fraction
    total_cost: Fraction
    count: int
    bound: Fraction
    lp: Fraction
    epsilon: Fraction

    @property
    def sum_ok(self) -> bool:
        return self.total_cost <= self.bound

    @property
    def chosen_ok(self) -> bool:
        return self.chosen_cost <= self.lp / self.epsilon

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "index": self.chosen_index,
            "chosen_cost": str(self.chosen_cost),
            "total_cost": str(self.total_cost),
            "layers": self.count,
            "bound_N_lp": str(self.bound),
            "sum_ok": self.sum_ok,
            "chosen_ok": self.chosen_ok,
        }


def layers_from(dist: Mapping[VertexId, int], w: Mapping[VertexId, int], count: int) -> List[Set[VertexId]]:
    """``L_i = {v : d(v) <= i < d(v) + w(v)}`` for ``i`` in ``0..count-1``.

    Removing any ``L_i`` cuts every path from the sources to a vertex at distance ``> i``.
    """
    layers: List[Set[VertexId]] = [set() for _ in range(count)]
    for v, d in dist.items():
        for i in range(d, min(d + w.get(v, 0), count)):
            layers[i].add(v)
    return layers


def layers_to(dist: Mapping[VertexId, int], w: Mapping[VertexId, int], count: int) -> List[Set[VertexId]]:
    """``T_i = {v : d(v) - w(v) < i <= d(v)}`` for ``i`` in ``1..count`` (stored at ``i-1``).

    ``d`` is distance *to* the targets. Removing any ``T_i`` cuts every path into
    the targets from a vertex with ``d >= i``.
    """
    layers: List[Set[VertexId]] = [set() for _ in range(count)]
    for v, d in dist.items():
        for i in range(max(d - w.get(v, 0) + 1, 1), min(d, count) + 1):
            layers[i - 1].add(v)
    return layers


def cheapest_layer(
    g: EmbeddedDigraph, layers: Sequence[Set[VertexId]], family: str, N: int, lp: Fraction, epsilon: Fraction, offset: int = 0
) -> Tuple[Set[VertexId], LayerAudit]:
    costs = [Fraction(total(g.costs[v] for v in L)) for L in layers]
    if costs:
        k = min(range(len(costs)), key=lambda i: (costs[i], i))
        chosen, chosen_cost = set(layers[k]), costs[k]
    else:
        k, chosen, chosen_cost = 0, set(), Fraction(0)
    audit = LayerAudit(family, k + offset, chosen_cost, sum(costs, Fraction(0)), len(layers), N * lp, lp, epsilon)
    return chosen, audit


# -- plan -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparatorPlan:
    branch: Branch
    removed: FrozenSet[VertexId]
    layer_audit: Tuple[LayerAudit, ...]
    tau_minus: FrozenSet[int]
    tau_plus: FrozenSet[int]
    kappa_minus: FrozenSet[int]
    kappa_plus: FrozenSet[int]
    cycle: DiCycle
    N: int
    eps_n: int
    lp: Fraction
    witnesses: Dict[str, Tuple[VertexId, ...]] = field(default_factory=dict)
    side: str = "tau"

    @property
    def audits_ok(self) -> bool:
        return all(a.sum_ok and a.chosen_ok for a in self.layer_audit)

    def to_json(self) -> dict:
        return {
            "branch": self.branch.value,
            "side": self.side,
            "removed": sorted(self.removed),
            "cycle": list(self.cycle.vertices),
            "N": self.N,
            "epsN": self.eps_n,
            "lp": str(self.lp),
            "tau_minus": sorted(self.tau_minus),
            "tau_plus": sorted(self.tau_plus),
            "kappa_minus": sorted(self.kappa_minus),
            "kappa_plus": sorted(self.kappa_plus),
            "witnesses": {k: list(v) for k, v in self.witnesses.items()},
            "layer_audit": [a.to_json() for a in self.layer_audit],
        }


def _positions(c: DiCycle, idx: Iterable[int]) -> List[VertexId]:
    return [c.vertices[i] for i in sorted(idx)]


def _far_side(o, ports, c1, src, dst, minus, plus, eps_n, N, lp, eps, tag):
    """Layers S (from unreached sources), T (into unreached targets) and Y (between cycle positions)."""
    g = ports.graph
    cyc = c1.vertices
    src_far = [u for u in ports.of_kind(src) if ports.by_vertex()[u].position not in plus]
    dst_far = [t for t in ports.of_kind(dst) if ports.by_vertex()[t].position not in minus]
    S, aS = cheapest_layer(g, layers_from(o.distances_from(src_far, cyc), o.w, eps_n), f"S[{tag}]", N, lp, eps)
    T, aT = cheapest_layer(g, layers_to(o.distances_to(dst_far, cyc), o.w, eps_n), f"T[{tag}]", N, lp, eps, offset=1)
    Y, aY = cheapest_layer(g, layers_from(o.distances_from(_positions(c1, minus)), o.w, eps_n), f"Y[{tag}]", N, lp, eps)
    return S | T | Y, [aS, aT, aY]


def _close_side(o, ports, c1, src, dst, minus, plus, eps_n, N, lp, eps, tag):
    g = ports.graph
    n = len(c1)
    cyc = c1.vertices
    info = ports.by_vertex()
    best = None
    for i in sorted(minus):
        dist = o.distances_from([cyc[i]])
        for j in sorted(plus):
            d = dist.get(cyc[j], math.inf)
            if d <= eps_n and (best is None or (d, i, j) < best):
                best = (d, i, j)
    if best is None:
        raise WitnessError(f"{tag}: no close pair within {eps_n}")
    _d, i, j = best
    p1 = o.shortest_path(ports.of_kind(src), ports.of_kind(dst, [i]), forbidden=cyc)
    p2 = o.shortest_path(ports.of_kind(src, [j]), ports.of_kind(dst), forbidden=cyc)
    p3 = o.shortest_path([cyc[i]], [cyc[j]])
    if p1 is None or p2 is None or p3 is None:
        raise WitnessError(f"{tag}: witness path missing for positions {i}, {j}")
    if path_weight(o.w, p1) >= eps_n or path_weight(o.w, p2) >= eps_n:
        raise WitnessError(f"{tag}: witness paths are not short")
    a = info[p1[0]].position
    b = info[p2[-1]].position
    p1 = p1 + (cyc[i],)
    p2 = p2 + (cyc[b],)
    if a == i or b == j:
        # with every x below the heavy threshold this loop would weigh less than N
        raise WitnessError(f"{tag}: witness returns to its own position (a={a}, i={i}, b={b}, j={j})")
    seg = c1.segment((j + 1) % n, b)
    R, aR = cheapest_layer(g, layers_from(o.distances_from(set(p2) | set(seg)), o.w, eps_n), f"R[{tag}]", N, lp, eps)
    K, aK = cheapest_layer(g, layers_from(o.distances_from([cyc[j]]), o.w, eps_n), f"K+[{tag}]", N, lp, eps)
    sides = (
        frozenset(p1) | frozenset(c1.segment(a, i)),
        frozenset(p2) | frozenset(c1.segment(j, b)),
    )
    witnesses = {"P1": p1, "P2": p2, "P3": p3, "a_i_j_b": (a, i, j, b)}
    return R | K, [aR, aK], witnesses, sides


def plan(ports: BoundaryPorts, sol: LpSolution, reach: Optional[ReachSets] = None, check: bool = True) -> SeparatorPlan:
    """Choose the FAR or CLOSE removal for the tight cycle of ``ports``.

    ``sol`` is the LP solution of the unported residual map; ports weigh 0.
    """
    c1 = ports.cycle
    g = ports.graph
    N, eps_n, eps = sol.N, sol.eps_n, sol.epsilon
    lp = Fraction(sol.objective) if sol.exact else Fraction(sol.objective).limit_denominator(10**6)
    o = WeightedDistanceOracle(g, sol.w)
    if reach is None:
        reach = port_reach_sets(ports, sol.w, eps_n)

    def gap(minus, plus):
        if not minus or not plus:
            return math.inf
        return o.distance(_positions(c1, minus), _positions(c1, plus))

    tau_far = gap(reach.tau_minus, reach.tau_plus) > eps_n
    kappa_far = gap(reach.kappa_minus, reach.kappa_plus) > eps_n
    common = dict(
        tau_minus=reach.tau_minus,
        tau_plus=reach.tau_plus,
        kappa_minus=reach.kappa_minus,
        kappa_plus=reach.kappa_plus,
        cycle=c1,
        N=N,
        eps_n=eps_n,
        lp=lp,
    )
    if tau_far and kappa_far:
        r1, a1 = _far_side(o, ports, c1, "U", "W", reach.tau_minus, reach.tau_plus, eps_n, N, lp, eps, "tau")
        r2, a2 = _far_side(o, ports, c1, "D", "B", reach.kappa_minus, reach.kappa_plus, eps_n, N, lp, eps, "kappa")
        result = SeparatorPlan(Branch.FAR, frozenset(r1 | r2), tuple(a1 + a2), **common)
        if check:
            check_far(ports, result.removed)
        return result
    if not tau_far:
        removed, audits, wit, sides = _close_side(
            o, ports, c1, "U", "W", reach.tau_minus, reach.tau_plus, eps_n, N, lp, eps, "tau"
        )
        side = "tau"
    else:
        removed, audits, wit, sides = _close_side(
            o, ports, c1, "D", "B", reach.kappa_minus, reach.kappa_plus, eps_n, N, lp, eps, "kappa"
        )
        side = "kappa"
    result = SeparatorPlan(Branch.CLOSE, frozenset(removed), tuple(audits), witnesses=wit, side=side, **common)
    if check:
        check_close(ports, result.removed, sides)
    return result


# -- post-conditions --------------------------------------------------------------------


def _path_inside(g: EmbeddedDigraph, comp: Set[VertexId], sources, targets) -> bool:
    seen = set(s for s in sources if s in comp)
    q = deque(seen)
    targets = set(targets)
    while q:
        u = q.popleft()
        if u in targets:
            return True
        for v in g.successors(u):
            if v in comp and v not in seen:
                seen.add(v)
                q.append(v)
    return False


def residual_components(ports: BoundaryPorts, removed: Iterable[VertexId]) -> List[List[VertexId]]:
    h = residual_graph(ports.graph, removed)
    return [c for c in scc(h) if len(c) > 1 or any(h.arcs[a].head == c[0] for a in h.out_arcs(c[0]))]


def check_far(ports: BoundaryPorts, removed: Iterable[VertexId]) -> None:
    """No residual SCC has a U->W or D->B path avoiding the cycle."""
    cyc = set(ports.cycle.vertices)
    g = ports.graph
    for comp in residual_components(ports, removed):
        inner = set(comp) - cyc
        for src, dst in (("U", "W"), ("D", "B")):
            if _path_inside(g, inner, ports.of_kind(src), ports.of_kind(dst)):
                raise TopologyAssertionError(f"FAR: component {comp[:8]}... keeps a {src}->{dst} path")


def check_close(ports: BoundaryPorts, removed: Iterable[VertexId], sides: Tuple[FrozenSet, FrozenSet]) -> None:
    """Every residual SCC avoids one of the two witness regions."""
    for comp in residual_components(ports, removed):
        cs = set(comp)
        if cs & sides[0] and cs & sides[1]:
            raise TopologyAssertionError(f"CLOSE: component {comp[:8]}... meets both witness regions")


def undirected_sides_separated(ports: BoundaryPorts, removed: Iterable[VertexId]) -> bool:
    """In each residual SCC minus the cycle, W+D and U+B are in different undirected pieces."""
    cyc = set(ports.cycle.vertices)
    g = ports.graph
    right = set(ports.W) | set(ports.D)
    left = set(ports.U) | set(ports.B)
    for comp in residual_components(ports, removed):
        inner = set(comp) - cyc
        seen = set(v for v in inner if v in right)
        q = deque(seen)
        while q:
            u = q.popleft()
            if u in left:
                return False
            for v in list(g.successors(u)) + list(g.predecessors(u)):
                if v in inner and v not in seen:
                    seen.add(v)
                    q.append(v)
    return True
