"""The full DFVS pipeline with genus recursion.

Each recursion node is a strongly connected sub-map. It runs the facial
hitter, rounds heavy LP values, applies one separator step around a tight
cycle, and recurses into the strong components of what is left. Every child
must be smaller than its parent in ``(genus, |V|)`` order; if a node makes no
progress it is handed to the exact oracle when small enough, otherwise the
solve aborts with a diagnostic bundle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from . import emd
from .costs import Cost, format_cost, total
from .dfvs_lp import DEFAULT_EPSILON, solve_lp
from .embedded_digraph import EmbeddedDigraph, VertexId, cyclic_vertices, genus, residual_graph, scc
from .facial_hitter import run as hit_facial
from .oracle import DFVS_CAP, exact_dfvs
from .separator import (
    HEAVY_THRESHOLD,
    LayerAudit,
    TopologyAssertionError,
    WitnessError,
    build_ports,
    plan,
    round_heavy,
    tight_cycle,
)

CERT_SCHEMA = "dfvs-cert/1"
PHASES = ("facial", "heavy", "separator", "oracle")


@dataclass(frozen=True)
class SolverConfig:
    epsilon: Fraction = DEFAULT_EPSILON
    heavy_threshold: Fraction = HEAVY_THRESHOLD
    oracle_cap: int = DFVS_CAP
    exact: bool = True


@dataclass(frozen=True)
class NodeRecord:
    id: int
    parent: Optional[int]
    genus: int
    n_vertices: int
    branch: str
    facial: Tuple[VertexId, ...] = ()
    heavy: Tuple[VertexId, ...] = ()
    separator: Tuple[VertexId, ...] = ()
    oracle: Tuple[VertexId, ...] = ()
    note: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "parent": self.parent,
            "genus": self.genus,
            "n_vertices": self.n_vertices,
            "branch": self.branch,
            "facial": list(self.facial),
            "heavy": list(self.heavy),
            "separator": list(self.separator),
            "oracle": list(self.oracle),
            "note": self.note,
        }


@dataclass(frozen=True)
class HeavyAudit:
    node: int
    cost: Fraction
    lp: Fraction
    threshold: Fraction

    @property
    def ok(self) -> bool:
        return self.cost <= self.lp / self.threshold


@dataclass(frozen=True)
class SolveCertificate:
    solution: FrozenSet[VertexId]
    cost: Cost
    lp_bound: Fraction
    phase_attribution: Dict[str, Cost]
    recursion_tree: Tuple[NodeRecord, ...]
    valid: bool
    approximate: bool = False
    epsilon: Fraction = DEFAULT_EPSILON
    layer_audits: Tuple[Tuple[int, LayerAudit], ...] = ()
    heavy_audits: Tuple[HeavyAudit, ...] = ()

    def edges(self) -> List[Tuple[NodeRecord, NodeRecord]]:
        by_id = {n.id: n for n in self.recursion_tree}
        return [(by_id[n.parent], n) for n in self.recursion_tree if n.parent is not None]

    @property
    def monotone(self) -> bool:
        return all((c.genus, c.n_vertices) < (p.genus, p.n_vertices) for p, c in self.edges())

    @property
    def fallbacks(self) -> int:
        return sum(1 for n in self.recursion_tree if n.branch == "ORACLE")

    def to_json(self) -> dict:
        return {
            "schema": CERT_SCHEMA,
            "solution": sorted(self.solution),
            "cost": format_cost(self.cost),
            "lp_bound": str(self.lp_bound),
            "valid": self.valid,
            "approximate": self.approximate,
            "epsilon": str(self.epsilon),
            "phase_attribution": {k: format_cost(v) for k, v in self.phase_attribution.items()},
            "recursion_tree": [n.to_json() for n in self.recursion_tree],
            "layer_audits": [dict(node=k, **a.to_json()) for k, a in self.layer_audits],
            "heavy_audits": [
                {"node": h.node, "cost": str(h.cost), "lp": str(h.lp), "ok": h.ok} for h in self.heavy_audits
            ],
        }


class SolveAborted(RuntimeError):
    """No progress on a node too large for the oracle; ``bundle`` has the evidence."""

    def __init__(self, message: str, bundle: Dict[str, Any]):
        super().__init__(message)
        self.bundle = bundle

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.bundle, fh, indent=2)


def check_solution(g: EmbeddedDigraph, S: Iterable[VertexId]) -> bool:
    """True iff deleting ``S`` leaves ``g`` acyclic."""
    return not cyclic_vertices(g, S)


def _strong_pieces(g: EmbeddedDigraph) -> List[EmbeddedDigraph]:
    h = residual_graph(g)
    return [h.induced(c) for c in scc(h) if len(c) > 1 or any(h.arcs[a].head == c[0] for a in h.out_arcs(c[0]))]


class _Run:
    def __init__(self, config: SolverConfig):
        self.config = config
        self.nodes: List[NodeRecord] = []
        self.parts: Dict[str, List[VertexId]] = {p: [] for p in PHASES}
        self.layer_audits: List[Tuple[int, LayerAudit]] = []
        self.heavy_audits: List[HeavyAudit] = []

    def node(self, h: EmbeddedDigraph, parent: Optional[int]) -> None:
        cfg = self.config
        nid = len(self.nodes)
        self.nodes.append(None)  # placeholder keeps ids in creation order
        gh, n = genus(h), len(h)
        hit = hit_facial(h)
        Z = tuple(sorted(hit.S))
        rest = residual_graph(h, Z)
        rec = dict(id=nid, parent=parent, genus=gh, n_vertices=n, facial=Z)
        if not len(rest):
            self._finish(NodeRecord(branch="ACYCLIC", **rec))
            return
        heavy = round_heavy(rest, cfg.heavy_threshold, cfg.epsilon, cfg.exact)
        self.heavy_audits.append(HeavyAudit(nid, heavy.cost, heavy.root_lp, heavy.threshold))
        rec["heavy"] = heavy.F
        h2 = heavy.graph
        if not len(h2):
            self._finish(NodeRecord(branch="ACYCLIC", **rec))
            return
        c1 = tight_cycle(h2, heavy.solution)
        try:
            if c1 is None:
                raise WitnessError("no binding cycle in the pool")
            sp = plan(build_ports(h2, c1), heavy.solution)
        except (TopologyAssertionError, WitnessError) as exc:
            self._fallback(h, rec, f"separator: {exc}")
            return
        removed = tuple(sorted(sp.removed))
        rec["separator"] = removed
        self.layer_audits.extend((nid, a) for a in sp.layer_audit)
        children = _strong_pieces(h.induced(set(h2.costs) - set(removed)))
        stuck = [c for c in children if (genus(c), len(c)) >= (gh, n)]
        if stuck:
            self._fallback(h, rec, "no progress after separator step")
            return
        self._finish(NodeRecord(branch=sp.branch.value, **rec))
        for c in children:
            self.node(c, nid)

    def _fallback(self, h: EmbeddedDigraph, rec: dict, reason: str) -> None:
        cap = self.config.oracle_cap
        if len(h) > cap:
            bundle = {
                "reason": reason,
                "node": rec,
                "oracle_cap": cap,
                "epsilon": str(self.config.epsilon),
                "heavy_threshold": str(self.config.heavy_threshold),
                "emd": emd.dumps(h),
            }
            raise SolveAborted(f"{reason} on a node with {len(h)} vertices (oracle cap {cap})", bundle)
        res = exact_dfvs(h, cap)
        rec = dict(rec, facial=(), heavy=(), separator=())
        self._finish(NodeRecord(branch="ORACLE", oracle=tuple(sorted(res.solution)), note=reason, **rec))

    def _finish(self, record: NodeRecord) -> None:
        self.nodes[record.id] = record
        self.parts["facial"].extend(record.facial)
        self.parts["heavy"].extend(record.heavy)
        self.parts["separator"].extend(record.separator)
        self.parts["oracle"].extend(record.oracle)


def solve(g: EmbeddedDigraph, config: Optional[SolverConfig] = None) -> SolveCertificate:
    """Valid DFVS of ``g`` with a cost breakdown and recursion record."""
    config = config or SolverConfig()
    root_lp = solve_lp(g, exact=config.exact, epsilon=config.epsilon).objective
    lp_bound = Fraction(root_lp) if config.exact else Fraction(root_lp).limit_denominator(10**6)
    run = _Run(config)
    for piece in _strong_pieces(g):
        run.node(piece, None)
    solution = frozenset(v for vs in run.parts.values() for v in vs)
    attribution = {p: total(g.costs[v] for v in run.parts[p]) for p in PHASES}
    return SolveCertificate(
        solution=solution,
        cost=total(g.costs[v] for v in solution),
        lp_bound=lp_bound,
        phase_attribution=attribution,
        recursion_tree=tuple(run.nodes),
        valid=check_solution(g, solution),
        approximate=not config.exact,
        epsilon=config.epsilon,
        layer_audits=tuple(run.layer_audits),
        heavy_audits=tuple(run.heavy_audits),
    )
