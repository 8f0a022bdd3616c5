"""Deterministic instance generators."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .embedded_digraph import Arc, Dart, EmbeddedDigraph, disjoint_union, genus


class Family(str, enum.Enum):
    TOROIDAL_GRID = "TOROIDAL_GRID"
    RANDOM_ROTATION = "RANDOM_ROTATION"
    PLANAR = "PLANAR"
    DISJOINT_UNION = "DISJOINT_UNION"


COST_MODELS = ("unit", "uniform-integer")


@dataclass(frozen=True)
class InstanceSpec:
    family: Family
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    cost_model: str = "unit"
    expected_genus: Optional[int] = None
    name: Optional[str] = None

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        ps = "-".join(f"{k}{v}" for k, v in sorted(self.params.items()) if k != "parts")
        return f"{self.family.value.lower()}-{ps}-s{self.seed}-{self.cost_model}"


def _costs(n_vertices: List[int], model: str, rng: random.Random) -> Dict[int, int]:
    if model == "unit":
        return {v: 1 for v in n_vertices}
    if model == "uniform-integer":
        return {v: rng.randint(1, 10) for v in n_vertices}
    raise ValueError(f"unknown cost model {model!r}")


def toroidal_grid(n: int, costs: Optional[Dict[int, int]] = None) -> EmbeddedDigraph:
    """C_n x C_n on the torus, arcs pointing right and down.

    Vertex ``(r, c)`` has id ``r*n + c``; its right arc has id ``2*(r*n+c)`` and
    its down arc ``2*(r*n+c)+1``. Rotation: in-left, in-up, out-right, out-down.
    """
    if n < 2:
        raise ValueError("toroidal grid needs n >= 2")
    vid = lambda r, c: (r % n) * n + (c % n)  # noqa: E731
    arcs = {}
    rotation = {}
    for r in range(n):
        for c in range(n):
            v = vid(r, c)
            arcs[2 * v] = Arc(v, vid(r, c + 1))
            arcs[2 * v + 1] = Arc(v, vid(r + 1, c))
    for r in range(n):
        for c in range(n):
            v = vid(r, c)
            rotation[v] = (
                Dart(2 * vid(r, c - 1), -1),
                Dart(2 * vid(r - 1, c) + 1, -1),
                Dart(2 * v, +1),
                Dart(2 * v + 1, +1),
            )
    costs = costs or {v: 1 for v in range(n * n)}
    return EmbeddedDigraph(costs, arcs, rotation)


def directed_cycle(k: int, costs: Optional[Dict[int, int]] = None) -> EmbeddedDigraph:
    """A single dicycle ``0 -> 1 -> ... -> k-1 -> 0`` on the sphere."""
    arcs = {i: Arc(i, (i + 1) % k) for i in range(k)}
    if k == 1:
        rotation = {0: (Dart(0, -1), Dart(0, 1))}
    else:
        rotation = {i: (Dart((i - 1) % k, -1), Dart(i, 1)) for i in range(k)}
    return EmbeddedDigraph(costs or {i: 1 for i in range(k)}, arcs, rotation)


# clockwise angular slots around a grid vertex
_SLOTS = {(-1, 0): 0, (-1, 1): 1, (0, 1): 2, (1, 1): 3, (1, 0): 4, (1, -1): 5, (0, -1): 6, (-1, -1): 7}


def planar_grid(
    rows: int,
    cols: int,
    rng: random.Random,
    p_both: float = 0.25,
    p_diag: float = 0.5,
    cost_model: str = "unit",
) -> EmbeddedDigraph:
    """Planar grid with random orientations, optional bidirected edges and diagonals."""
    vid = lambda r, c: r * cols + c  # noqa: E731
    edges: List[Tuple[Tuple[int, int], Tuple[int, int]]] = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append(((r, c), (r, c + 1)))
            if r + 1 < rows:
                edges.append(((r, c), (r + 1, c)))
            if r + 1 < rows and c + 1 < cols and rng.random() < p_diag:
                if rng.random() < 0.5:
                    edges.append(((r, c), (r + 1, c + 1)))
                else:
                    edges.append(((r, c + 1), (r + 1, c)))
    arcs: Dict[int, Arc] = {}
    slot_darts: Dict[int, List[Tuple[int, int, Dart]]] = {vid(r, c): [] for r in range(rows) for c in range(cols)}
    for p, q in edges:
        u, v = vid(*p), vid(*q)
        x = rng.random()
        if x < p_both:
            pairs = [(u, v), (v, u)]
        elif x < p_both + (1 - p_both) / 2:
            pairs = [(u, v)]
        else:
            pairs = [(v, u)]
        su = _SLOTS[(q[0] - p[0], q[1] - p[1])]
        sv = _SLOTS[(p[0] - q[0], p[1] - q[1])]
        for k, (t, h) in enumerate(pairs):
            a = len(arcs)
            arcs[a] = Arc(t, h)
            du = Dart(a, 1 if t == u else -1)
            dv = Dart(a, 1 if t == v else -1)
            # parallel darts in one slot: order k at u, reverse order at v keeps them uncrossed
            slot_darts[u].append((su, k, du))
            slot_darts[v].append((sv, -k, dv))
    rotation = {v: tuple(d for _s, _k, d in sorted(lst)) for v, lst in slot_darts.items()}
    costs = _costs(sorted(slot_darts), cost_model, rng)
    return EmbeddedDigraph(costs, arcs, rotation)


def random_rotation_digraph(
    n: int, extra: int, rng: random.Random, cost_model: str = "unit", base: Optional[EmbeddedDigraph] = None
) -> EmbeddedDigraph:
    """Hamiltonian dicycle plus ``extra`` random chords, with a uniformly random rotation.

    With ``base`` given, only the rotation is redrawn. Genus is at most
    ``(extra + 1) // 2`` per component.
    """
    if base is None:
        order = list(range(n))
        rng.shuffle(order)
        arcs: Dict[int, Arc] = {}
        pairs = set()
        for k in range(n):
            t, h = order[k], order[(k + 1) % n]
            arcs[len(arcs)] = Arc(t, h)
            pairs.add((t, h))
        tries = 0
        while len(arcs) < n + extra and tries < 100 * (extra + 1):
            tries += 1
            t, h = rng.randrange(n), rng.randrange(n)
            if t == h or (t, h) in pairs:
                continue
            pairs.add((t, h))
            arcs[len(arcs)] = Arc(t, h)
        costs = _costs(list(range(n)), cost_model, rng)
    else:
        arcs = dict(base.arcs)
        costs = dict(base.costs)
    incident: Dict[int, List[Dart]] = {v: [] for v in costs}
    for a in sorted(arcs):
        t, h = arcs[a]
        incident[t].append(Dart(a, 1))
        incident[h].append(Dart(a, -1))
    rotation = {}
    for v in sorted(incident):
        ds = incident[v]
        rng.shuffle(ds)
        rotation[v] = tuple(ds)
    return EmbeddedDigraph(costs, arcs, rotation)


def generate(spec: InstanceSpec) -> EmbeddedDigraph:
    """Build the instance described by ``spec``; identical output for identical specs."""
    rng = random.Random(spec.seed)
    p = spec.params
    fam = Family(spec.family)
    if spec.cost_model not in COST_MODELS:
        raise ValueError(f"unknown cost model {spec.cost_model!r}")
    if fam is Family.TOROIDAL_GRID:
        n = int(p.get("n", 3))
        costs = _costs(list(range(n * n)), spec.cost_model, rng)
        g = toroidal_grid(n, costs)
    elif fam is Family.PLANAR:
        kind = p.get("kind", "grid")
        if kind == "cycle":
            k = int(p.get("k", 3))
            g = directed_cycle(k, _costs(list(range(k)), spec.cost_model, rng))
        elif kind == "grid":
            g = planar_grid(
                int(p.get("rows", 3)),
                int(p.get("cols", 3)),
                rng,
                p_both=float(p.get("p_both", 0.25)),
                p_diag=float(p.get("p_diag", 0.5)),
                cost_model=spec.cost_model,
            )
        else:
            raise ValueError(f"unknown planar kind {kind!r}")
    elif fam is Family.RANDOM_ROTATION:
        n = int(p.get("n", 8))
        extra = int(p.get("extra", 4))
        if n < 2 or extra < 0:
            raise ValueError("RANDOM_ROTATION needs n >= 2 and extra >= 0")
        g = random_rotation_digraph(n, extra, rng, spec.cost_model)
    elif fam is Family.DISJOINT_UNION:
        parts = [generate(s) for s in p.get("parts", [])]
        if not parts:
            raise ValueError("DISJOINT_UNION needs parts")
        g = disjoint_union(parts)
    else:  # pragma: no cover
        raise ValueError(f"unknown family {spec.family}")
    if spec.expected_genus is not None and fam in (Family.TOROIDAL_GRID, Family.PLANAR):
        got = genus(g)
        if got != spec.expected_genus:
            raise ValueError(f"{spec.label}: expected genus {spec.expected_genus}, computed {got}")
    return g
