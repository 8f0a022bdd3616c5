"""Primal-dual hitting of facial dicycles.

Each iteration raises the dual of every directed face of the current residual
map by the same amount, stopping at the first vertex that becomes tight. All
tight vertices join the solution. A reverse-deletion pass then drops vertices
that are no longer needed to keep the residual free of directed faces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, IO, List, Sequence, Tuple

from .costs import INF, Cost, format_cost, total
from .embedded_digraph import DiCycle, EmbeddedDigraph, VertexId, directed_faces, genus, residual_graph


class HitterInfeasibleError(ValueError):
    def __init__(self, cycle: DiCycle):
        super().__init__(f"face-minimal dicycle {cycle.vertices} has only infinite-cost vertices")
        self.cycle = cycle


@dataclass(frozen=True)
class DualLedger:
    """Dual values per raised cycle and the remaining vertex slack."""

    raised: Tuple[Tuple[DiCycle, Fraction], ...]
    slack: Dict[VertexId, Fraction]

    @property
    def value(self) -> Fraction:
        return sum((y for _c, y in self.raised), Fraction(0))

    def load(self) -> Dict[VertexId, Fraction]:
        """``sum of y_C over C containing v`` for every touched vertex."""
        out: Dict[VertexId, Fraction] = {}
        for c, y in self.raised:
            for v in c.vertices:
                out[v] = out.get(v, Fraction(0)) + y
        return out


@dataclass(frozen=True)
class IterationRecord:
    index: int
    faces: Tuple[DiCycle, ...]
    delta: Fraction
    tight: Tuple[VertexId, ...]

    def to_json(self) -> dict:
        return {
            "iteration": self.index,
            "faces": [list(c.vertices) for c in self.faces],
            "delta": str(self.delta),
            "tight": list(self.tight),
        }


@dataclass(frozen=True)
class HitterResult:
    S: frozenset
    ledger: DualLedger
    addition_order: Tuple[VertexId, ...]
    iterations: Tuple[IterationRecord, ...]
    per_iteration_stats: Tuple[Tuple[int, int], ...]
    genus: int
    cost: Cost = field(default=0)

    @property
    def dual_value(self) -> Fraction:
        return self.ledger.value


def _debit_stats(iterations: Sequence[IterationRecord], S) -> Tuple[Tuple[int, int], ...]:
    S = set(S)
    return tuple((len(it.faces), sum(len(S.intersection(c.vertices)) for c in it.faces)) for it in iterations)


def _has_directed_face(g: EmbeddedDigraph, removed) -> bool:
    return bool(directed_faces(residual_graph(g, removed)))


def run(g: EmbeddedDigraph) -> HitterResult:
    """Hit every face-minimal dicycle of every intermediate residual map."""
    slack: Dict[VertexId, Fraction] = {v: Fraction(c) for v, c in g.costs.items() if c is not INF}
    raised: Dict[tuple, List] = {}
    order: List[VertexId] = []
    iterations: List[IterationRecord] = []
    while True:
        faces = directed_faces(residual_graph(g, order))
        if not faces:
            break
        k: Dict[VertexId, int] = {}
        for c in faces:
            if all(v not in slack for v in c.vertices):
                raise HitterInfeasibleError(c)
            for v in c.vertices:
                k[v] = k.get(v, 0) + 1
        delta = min(slack[v] / n for v, n in k.items() if v in slack)
        for v, n in k.items():
            if v in slack:
                slack[v] -= delta * n
        for c in faces:
            entry = raised.setdefault(c.key(), [c, Fraction(0)])
            entry[1] += delta
        tight = tuple(sorted(v for v in k if v in slack and slack[v] == 0))
        order.extend(tight)
        iterations.append(IterationRecord(len(iterations), tuple(faces), delta, tight))

    # reverse deletion, repeated until a full pass keeps everything
    S = list(order)
    changed = True
    while changed:
        changed = False
        for v in reversed(order):
            if v not in S:
                continue
            rest = [u for u in S if u != v]
            if not _has_directed_face(g, rest):
                S = rest
                changed = True
    ledger = DualLedger(tuple((c, y) for c, y in raised.values()), slack)
    return HitterResult(
        S=frozenset(S),
        ledger=ledger,
        addition_order=tuple(order),
        iterations=tuple(iterations),
        per_iteration_stats=_debit_stats(iterations, S),
        genus=genus(g),
        cost=total(g.costs[v] for v in S),
    )


@dataclass(frozen=True)
class CertificateReport:
    checks: Dict[str, bool]
    failures: Tuple[str, ...]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def verify_certificate(g: EmbeddedDigraph, r: HitterResult) -> CertificateReport:
    """Recheck a hitter run from its ledger and iteration log."""
    fails: List[str] = []
    load = r.ledger.load()
    feasible = True
    for c, y in r.ledger.raised:
        if y < 0:
            feasible = False
            fails.append(f"negative dual on {c.vertices}")
    for v, s in load.items():
        c = g.costs[v]
        if c is not INF and s > c:
            feasible = False
            fails.append(f"vertex {v}: dual load {s} exceeds cost {c}")
    # replay: every prefix of the raise sequence must also be feasible
    running: Dict[VertexId, Fraction] = {}
    for it in r.iterations:
        for c in it.faces:
            for v in c.vertices:
                running[v] = running.get(v, Fraction(0)) + it.delta
        for v, s in running.items():
            if g.costs[v] is not INF and s > g.costs[v]:
                feasible = False
                fails.append(f"iteration {it.index}: vertex {v} over-tight")
    tight = True
    for v in sorted(r.S):
        if g.costs[v] is INF or load.get(v, Fraction(0)) != g.costs[v]:
            tight = False
            fails.append(f"vertex {v} in S is not tight")
    beta = 3 + 3 * r.genus
    stats = _debit_stats(r.iterations, r.S)
    debit = all(s <= beta * n for n, s in stats)
    if not debit:
        fails.append(f"per-iteration debit bound (3+3g)={beta} violated: {stats}")
    facial_free = not _has_directed_face(g, r.S)
    if not facial_free:
        fails.append("residual still has a directed face")
    minimal = all(_has_directed_face(g, r.S - {v}) for v in r.S)
    if not minimal:
        fails.append("S is not minimal")
    cost = total(g.costs[v] for v in r.S)
    cost_bound = cost <= beta * r.ledger.value
    if not cost_bound:
        fails.append(f"cost {cost} exceeds {beta} * dual {r.ledger.value}")
    checks = {
        "dual_feasible": feasible,
        "tight": tight,
        "debit_bound": debit,
        "facial_free": facial_free,
        "minimal": minimal,
        "cost_bound": cost_bound,
    }
    if r.genus == 0:
        checks["planar_bound"] = cost <= 3 * r.ledger.value
        if not checks["planar_bound"]:
            fails.append(f"planar: cost {cost} exceeds 3 * dual {r.ledger.value}")
    return CertificateReport(checks, tuple(fails))


def write_trace(r: HitterResult, fh: IO[str]) -> None:
    """One JSON object per iteration, then a summary line."""
    for it in r.iterations:
        fh.write(json.dumps(it.to_json()) + "\n")
    fh.write(
        json.dumps(
            {
                "summary": True,
                "S": sorted(r.S),
                "addition_order": list(r.addition_order),
                "cost": format_cost(r.cost),
                "dual": str(r.dual_value),
            }
        )
        + "\n"
    )
