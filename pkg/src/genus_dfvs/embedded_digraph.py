"""Combinatorial maps for embedded digraphs.

A digraph is embedded on an orientable surface by a rotation system: every
vertex lists the darts incident to it in cyclic order. Each arc contributes a
tail dart (sitting at its tail) and a head dart (sitting at its head). Faces
are the orbits of ``dart -> successor(reverse(dart))``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .costs import INF, Cost

VertexId = int
ArcId = int


class MapError(ValueError):
    """The rotation system does not describe a valid combinatorial map."""


class GenusError(RuntimeError):
    """Euler characteristic inconsistent with an orientable surface."""


class Arc(NamedTuple):
    tail: VertexId
    head: VertexId


class Dart(NamedTuple):
    """One end of an arc; ``sign`` is +1 for the tail end, -1 for the head end."""

    arc: ArcId
    sign: int

    def reversed(self) -> "Dart":
        return Dart(self.arc, -self.sign)

    @property
    def is_tail(self) -> bool:
        return self.sign > 0

    def __str__(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}{self.arc}"


class Side(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    def flipped(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


@dataclass(frozen=True)
class DiCycle:
    """Directed cycle; ``arcs[k]`` joins ``vertices[k]`` to ``vertices[k+1]``."""

    vertices: Tuple[VertexId, ...]
    arcs: Tuple[ArcId, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.arcs) or not self.vertices:
            raise ValueError("a dicycle needs as many arcs as vertices (at least one)")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError(f"repeated vertex in dicycle {self.vertices}")

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def canonical(self) -> "DiCycle":
        """Same cycle rotated to start at its smallest vertex."""
        k = self.vertices.index(min(self.vertices))
        return DiCycle(self.vertices[k:] + self.vertices[:k], self.arcs[k:] + self.arcs[:k])

    def key(self) -> Tuple[Tuple[VertexId, ...], Tuple[ArcId, ...]]:
        c = self.canonical()
        return (c.vertices, c.arcs)

    def rerooted(self, k: int) -> "DiCycle":
        k %= len(self.vertices)
        return DiCycle(self.vertices[k:] + self.vertices[:k], self.arcs[k:] + self.arcs[:k])

    def segment(self, i: int, j: int) -> Tuple[VertexId, ...]:
        """Vertices met walking forward from position ``i`` to position ``j``."""
        n = len(self.vertices)
        out = [self.vertices[i % n]]
        k = i % n
        while k != j % n:
            k = (k + 1) % n
            out.append(self.vertices[k])
        return tuple(out)


@dataclass(frozen=True)
class FaceWalk:
    """One face of the map as its cyclic dart sequence.

    ``vertex`` is only set for the empty face around an isolated vertex.
    """

    darts: Tuple[Dart, ...]
    vertex: Optional[VertexId] = None

    def __len__(self) -> int:
        return len(self.darts)


@dataclass(frozen=True, eq=False)
class EmbeddedDigraph:
    """Digraph with vertex costs and a rotation system.

    Treat instances as immutable; the ``induced``/``without`` helpers build
    new maps whose rotations are restrictions of this one.
    """

    costs: Mapping[VertexId, Cost]
    arcs: Mapping[ArcId, Arc]
    rotation: Mapping[VertexId, Tuple[Dart, ...]]
    _dart_at: Dict[Dart, Tuple[VertexId, int]] = field(init=False, repr=False)
    _out: Dict[VertexId, Tuple[ArcId, ...]] = field(init=False, repr=False)
    _in: Dict[VertexId, Tuple[ArcId, ...]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        costs = dict(self.costs)
        arcs = {a: Arc(*t) for a, t in self.arcs.items()}
        rotation = {v: tuple(Dart(*d) for d in rot) for v, rot in self.rotation.items()}
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "rotation", rotation)
        self._validate()
        dart_at: Dict[Dart, Tuple[VertexId, int]] = {}
        for v, rot in rotation.items():
            for k, d in enumerate(rot):
                dart_at[d] = (v, k)
        out: Dict[VertexId, List[ArcId]] = {v: [] for v in costs}
        inc: Dict[VertexId, List[ArcId]] = {v: [] for v in costs}
        for a in sorted(arcs):
            t, h = arcs[a]
            out[t].append(a)
            inc[h].append(a)
        object.__setattr__(self, "_dart_at", dart_at)
        object.__setattr__(self, "_out", {v: tuple(x) for v, x in out.items()})
        object.__setattr__(self, "_in", {v: tuple(x) for v, x in inc.items()})

    def _validate(self) -> None:
        for v, c in self.costs.items():
            if c is not INF and c < 0:
                raise MapError(f"vertex {v} has negative cost {c}")
        if set(self.rotation) != set(self.costs):
            missing = set(self.costs) ^ set(self.rotation)
            raise MapError(f"rotation/vertex mismatch at {sorted(missing, key=repr)}")
        for a, (t, h) in self.arcs.items():
            if t not in self.costs or h not in self.costs:
                raise MapError(f"arc {a} has unknown endpoint")
        seen: Dict[Dart, VertexId] = {}
        for v, rot in self.rotation.items():
            for d in rot:
                if d.arc not in self.arcs or d.sign not in (1, -1):
                    raise MapError(f"dart {d} at vertex {v} names no arc")
                if d in seen:
                    raise MapError(f"dart {d} appears twice (vertices {seen[d]} and {v})")
                owner = self.arcs[d.arc].tail if d.sign > 0 else self.arcs[d.arc].head
                if owner != v:
                    raise MapError(f"dart {d} listed at vertex {v} but belongs to {owner}")
                seen[d] = v
        for a in self.arcs:
            for s in (1, -1):
                if Dart(a, s) not in seen:
                    raise MapError(f"dart {Dart(a, s)} is missing from every rotation")

    # -- basic accessors ---------------------------------------------------

    @property
    def vertices(self) -> List[VertexId]:
        return sorted(self.costs)

    def __len__(self) -> int:
        return len(self.costs)

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)

    def out_arcs(self, v: VertexId) -> Tuple[ArcId, ...]:
        return self._out[v]

    def in_arcs(self, v: VertexId) -> Tuple[ArcId, ...]:
        return self._in[v]

    def successors(self, v: VertexId) -> List[VertexId]:
        return [self.arcs[a].head for a in self._out[v]]

    def predecessors(self, v: VertexId) -> List[VertexId]:
        return [self.arcs[a].tail for a in self._in[v]]

    def dart_vertex(self, d: Dart) -> VertexId:
        return self._dart_at[d][0]

    def next_in_rotation(self, d: Dart) -> Dart:
        v, k = self._dart_at[d]
        rot = self.rotation[v]
        return rot[(k + 1) % len(rot)]

    def darts(self) -> List[Dart]:
        return sorted(self._dart_at, key=lambda d: (d.arc, -d.sign))

    def cost(self, vs: Iterable[VertexId]) -> Cost:
        from .costs import total

        return total(self.costs[v] for v in vs)

    # -- builders ----------------------------------------------------------

    def induced(self, keep: Iterable[VertexId]) -> "EmbeddedDigraph":
        """Sub-map induced by ``keep``; rotations are restricted, never reordered."""
        keep = set(keep)
        arcs = {a: arc for a, arc in self.arcs.items() if arc.tail in keep and arc.head in keep}
        rotation = {v: tuple(d for d in self.rotation[v] if d.arc in arcs) for v in keep}
        return EmbeddedDigraph({v: self.costs[v] for v in keep}, arcs, rotation)

    def without(self, removed: Iterable[VertexId]) -> "EmbeddedDigraph":
        removed = set(removed)
        return self.induced(v for v in self.costs if v not in removed)

    def with_costs(self, costs: Mapping[VertexId, Cost]) -> "EmbeddedDigraph":
        merged = dict(self.costs)
        merged.update(costs)
        return EmbeddedDigraph(merged, self.arcs, self.rotation)

    def mirrored(self) -> "EmbeddedDigraph":
        """Same digraph with every rotation reversed (orientation flip)."""
        rotation = {v: tuple(reversed(rot)) for v, rot in self.rotation.items()}
        return EmbeddedDigraph(self.costs, self.arcs, rotation)

    def relabeled(self, vertex_offset: int, arc_offset: int) -> "EmbeddedDigraph":
        costs = {v + vertex_offset: c for v, c in self.costs.items()}
        arcs = {a + arc_offset: Arc(t + vertex_offset, h + vertex_offset) for a, (t, h) in self.arcs.items()}
        rotation = {
            v + vertex_offset: tuple(Dart(d.arc + arc_offset, d.sign) for d in rot)
            for v, rot in self.rotation.items()
        }
        return EmbeddedDigraph(costs, arcs, rotation)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddedDigraph):
            return NotImplemented
        return self.costs == other.costs and self.arcs == other.arcs and self.rotation == other.rotation

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.costs)), tuple(sorted(self.arcs))))

    def __repr__(self) -> str:
        return f"EmbeddedDigraph(|V|={len(self.costs)}, |A|={len(self.arcs)})"


def disjoint_union(parts: Sequence[EmbeddedDigraph]) -> EmbeddedDigraph:
    """Union of maps, relabelling so ids never collide."""
    costs: Dict[VertexId, Cost] = {}
    arcs: Dict[ArcId, Arc] = {}
    rotation: Dict[VertexId, Tuple[Dart, ...]] = {}
    voff = aoff = 0
    for p in parts:
        q = p.relabeled(voff - min(p.costs, default=0), aoff - min(p.arcs, default=0))
        costs.update(q.costs)
        arcs.update(q.arcs)
        rotation.update(q.rotation)
        voff = max(costs, default=-1) + 1
        aoff = max(arcs, default=-1) + 1
    return EmbeddedDigraph(costs, arcs, rotation)


# -- faces and genus ---------------------------------------------------------


def trace_faces(g: EmbeddedDigraph) -> List[FaceWalk]:
    """All faces of ``g``; isolated vertices contribute one empty face each."""
    faces: List[FaceWalk] = []
    visited = set()
    for start in g.darts():
        if start in visited:
            continue
        walk = []
        d = start
        while d not in visited:
            visited.add(d)
            walk.append(d)
            d = g.next_in_rotation(d.reversed())
        if d != start:
            raise MapError(f"face tracing from {start} re-entered at {d}")
        faces.append(FaceWalk(tuple(walk)))
    for v in g.vertices:
        if not g.rotation[v]:
            faces.append(FaceWalk((), vertex=v))
    return faces


def components(g: EmbeddedDigraph) -> List[List[VertexId]]:
    """Connected components of the underlying undirected graph."""
    parent = {v: v for v in g.costs}

    def find(x: VertexId) -> VertexId:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, h in g.arcs.values():
        rt, rh = find(t), find(h)
        if rt != rh:
            parent[max(rt, rh)] = min(rt, rh)
    groups: Dict[VertexId, List[VertexId]] = {}
    for v in g.vertices:
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def genus(g: EmbeddedDigraph) -> int:
    """Sum over connected components of ``(2 - V + A - F) / 2``."""
    comp_of = {}
    comps = components(g)
    for k, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = k
    nv = [len(c) for c in comps]
    na = [0] * len(comps)
    nf = [0] * len(comps)
    for t, _h in g.arcs.values():
        na[comp_of[t]] += 1
    for f in trace_faces(g):
        v = f.vertex if f.vertex is not None else g.dart_vertex(f.darts[0])
        nf[comp_of[v]] += 1
    total = 0
    for k in range(len(comps)):
        defect = 2 - nv[k] + na[k] - nf[k]
        if defect % 2 or defect < 0:
            raise GenusError(f"component {k}: V={nv[k]} A={na[k]} F={nf[k]} gives defect {defect}")
        total += defect // 2
    return total


def _face_as_dicycle(g: EmbeddedDigraph, f: FaceWalk) -> Optional[DiCycle]:
    if not f.darts:
        return None
    signs = {d.sign for d in f.darts}
    if len(signs) != 1:
        return None
    arcs = [d.arc for d in f.darts]
    if signs == {-1}:
        # walked against every arc: the dicycle is the reversed walk
        arcs.reverse()
    verts = tuple(g.arcs[a].tail for a in arcs)
    if len(set(verts)) != len(verts):
        return None
    return DiCycle(verts, tuple(arcs))


def directed_faces(g: EmbeddedDigraph) -> List[DiCycle]:
    """One dicycle per face whose boundary is a simple directed cycle.

    A cycle bounding two faces (a sphere-embedded cycle) appears twice.
    """
    out = []
    for f in trace_faces(g):
        c = _face_as_dicycle(g, f)
        if c is not None:
            out.append(c.canonical())
    return out


def face_minimal_dicycles(g: EmbeddedDigraph) -> List[DiCycle]:
    """Face-bounding dicycles, each reported once."""
    seen = {}
    for c in directed_faces(g):
        seen.setdefault(c.key(), c)
    return [seen[k] for k in sorted(seen)]


# -- strong connectivity -----------------------------------------------------


def scc(g: EmbeddedDigraph, within: Optional[Iterable[VertexId]] = None) -> List[List[VertexId]]:
    """Strongly connected components (iterative Tarjan), sorted by smallest vertex.

    ``within`` restricts the computation to an induced subgraph without
    building a new map.
    """
    allowed = set(g.costs) if within is None else set(within)
    succ = {v: [w for w in g.successors(v) if w in allowed] for v in allowed}
    index: Dict[VertexId, int] = {}
    low: Dict[VertexId, int] = {}
    on_stack = set()
    stack: List[VertexId] = []
    result: List[List[VertexId]] = []
    counter = 0
    for root in sorted(allowed):
        if root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, i = work[-1]
            nbrs = succ[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    result.append(sorted(comp))
    return sorted(result, key=lambda c: c[0])


def cyclic_vertices(g: EmbeddedDigraph, removed: Iterable[VertexId] = ()) -> List[VertexId]:
    """Vertices lying on some dicycle of ``g`` minus ``removed``."""
    removed = set(removed)
    alive = [v for v in g.costs if v not in removed]
    alive_set = set(alive)
    keep = []
    for comp in scc(g, alive):
        if len(comp) > 1:
            keep.extend(comp)
        else:
            v = comp[0]
            if any(g.arcs[a].head == v for a in g.out_arcs(v)) and v in alive_set:
                keep.append(v)
    return sorted(keep)


def residual_graph(g: EmbeddedDigraph, removed: Iterable[VertexId] = ()) -> EmbeddedDigraph:
    """Sub-map induced by the vertices still on a dicycle after deleting ``removed``."""
    return g.induced(cyclic_vertices(g, removed))


def is_acyclic(g: EmbeddedDigraph, removed: Iterable[VertexId] = ()) -> bool:
    return not cyclic_vertices(g, removed)


# -- sides of a dicycle ------------------------------------------------------


def _check_cycle(g: EmbeddedDigraph, c: DiCycle) -> None:
    n = len(c.vertices)
    for k, a in enumerate(c.arcs):
        if a not in g.arcs:
            raise ValueError(f"arc {a} of the cycle is not in the graph")
        if g.arcs[a] != (c.vertices[k], c.vertices[(k + 1) % n]):
            raise ValueError(f"arc {a} does not join {c.vertices[k]} -> {c.vertices[(k + 1) % n]}")


def classify_sides(g: EmbeddedDigraph, c: DiCycle) -> Dict[Dart, Side]:
    """Assign every non-cycle dart at a cycle vertex to the LEFT or RIGHT of ``c``.

    At ``v_k`` the darts strictly after the incoming cycle dart and before the
    outgoing one (in rotation order) are LEFT, the remaining ones RIGHT. The
    rule is local, so it is automatically consistent along ``c`` for an
    oriented map.
    """
    _check_cycle(g, c)
    out: Dict[Dart, Side] = {}
    for k, v in enumerate(c.vertices):
        d_in = Dart(c.arcs[k - 1], -1)
        d_out = Dart(c.arcs[k], +1)
        rot = g.rotation[v]
        p = rot.index(d_in)
        side = Side.LEFT
        for step in range(1, len(rot)):
            d = rot[(p + step) % len(rot)]
            if d == d_out:
                side = Side.RIGHT
                continue
            out[d] = side
    return out


def cycle_key_order(cycles: Iterable[DiCycle]) -> List[DiCycle]:
    return sorted(cycles, key=lambda c: (len(c), c.key()))


def dicycle_from_vertices(g: EmbeddedDigraph, verts: Sequence[VertexId]) -> DiCycle:
    """Build a DiCycle from a vertex sequence, choosing the smallest arc id per hop."""
    n = len(verts)
    arcs = []
    for k in range(n):
        t, h = verts[k], verts[(k + 1) % n]
        cands = [a for a in g.out_arcs(t) if g.arcs[a].head == h]
        if not cands:
            raise ValueError(f"no arc {t} -> {h}")
        arcs.append(min(cands))
    return DiCycle(tuple(verts), tuple(arcs))
