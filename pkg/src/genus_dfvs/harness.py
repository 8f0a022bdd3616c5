"""Corpus construction, corpus directories and the CSV experiment runner."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Union

from . import emd
from .costs import INF, format_cost
from .embedded_digraph import EmbeddedDigraph, genus
from .generators import Family, InstanceSpec, generate
from .genus_solver import SolveAborted, SolverConfig, solve
from .oracle import max_dicycle_packing, exact_dfvs

REPORT_VERSION = "dfvs-report/1"
CSV_COLUMNS = (
    "version",
    "instance",
    "family",
    "n_vertices",
    "n_arcs",
    "genus",
    "lp",
    "exact_opt",
    "cost",
    "cost_over_lp",
    "cost_over_opt",
    "packing",
    "opt_over_packing",
    "valid",
    "sandwich",
    "branches",
    "fallbacks",
    "error",
    "timing",
)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    graph: EmbeddedDigraph
    meta: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    oracle_cap: int = 14
    packing_cap: int = 14
    solver: SolverConfig = field(default_factory=SolverConfig)


# -- corpus ----------------------------------------------------------------------------


def default_corpus() -> List[InstanceSpec]:
    """The acceptance corpus: 231 instances, at most 60 vertices each."""
    specs: List[InstanceSpec] = []
    T, P, R, U = Family.TOROIDAL_GRID, Family.PLANAR, Family.RANDOM_ROTATION, Family.DISJOINT_UNION
    for n in range(2, 7):
        specs.append(InstanceSpec(T, {"n": n}, 0, "unit", expected_genus=1))
        for seed in range(1, 5):
            specs.append(InstanceSpec(T, {"n": n}, seed, "uniform-integer", expected_genus=1))
    for k in (1, 2, 3, 5, 8, 13):
        for cm in ("unit", "uniform-integer"):
            specs.append(InstanceSpec(P, {"kind": "cycle", "k": k}, k, cm, expected_genus=0))
    shapes = [(2, 3), (3, 3), (3, 4), (4, 4), (3, 6), (4, 5), (5, 5), (5, 7), (6, 6), (6, 8), (7, 8)]
    seed = 100
    for rows, cols in shapes:
        for cm in ("unit", "uniform-integer"):
            for _ in range(3):
                specs.append(InstanceSpec(P, {"kind": "grid", "rows": rows, "cols": cols}, seed, cm, expected_genus=0))
                seed += 1
    for n in (6, 8, 10, 12, 14, 20, 30, 45, 60):
        for extra in range(0, 6):
            for rep in range(2):
                cm = "unit" if (n + extra + rep) % 2 else "uniform-integer"
                specs.append(InstanceSpec(R, {"n": n, "extra": extra}, 1000 + 100 * n + 10 * extra + rep, cm))
    for k in range(20):
        a = InstanceSpec(T, {"n": 2 + k % 3}, k, "uniform-integer")
        b = (
            InstanceSpec(R, {"n": 6 + k % 5, "extra": k % 4}, 500 + k, "unit")
            if k % 2
            else InstanceSpec(P, {"kind": "grid", "rows": 3, "cols": 3 + k % 3}, 700 + k, "unit")
        )
        specs.append(
            InstanceSpec(U, {"parts": [a, b]}, k, "unit", name=f"union-{k:02d}")
        )
    return specs


def _spec_to_meta(spec: InstanceSpec) -> Dict[str, str]:
    params = {
        k: ([_spec_to_json(p) for p in v] if k == "parts" else v) for k, v in sorted(spec.params.items())
    }
    meta = {
        "family": spec.family.value,
        "seed": str(spec.seed),
        "cost_model": spec.cost_model,
        "params": json.dumps(params, sort_keys=True),
    }
    if spec.expected_genus is not None:
        meta["expected_genus"] = str(spec.expected_genus)
    return meta


def _spec_to_json(spec: InstanceSpec) -> dict:
    return {"family": spec.family.value, "params": dict(spec.params), "seed": spec.seed, "cost_model": spec.cost_model}


def write_corpus(specs: Sequence[InstanceSpec], directory: Union[str, os.PathLike]) -> List[str]:
    """Write ``<id>.emd`` plus a ``<id>.spec`` key=value manifest per instance."""
    os.makedirs(directory, exist_ok=True)
    ids = []
    for k, spec in enumerate(specs):
        iid = f"{k:03d}-{spec.label}"
        g = generate(spec)
        emd.dump(g, os.path.join(directory, iid + ".emd"))
        with open(os.path.join(directory, iid + ".spec"), "w") as fh:
            for key, val in _spec_to_meta(spec).items():
                fh.write(f"{key}={val}\n")
        ids.append(iid)
    return ids


def read_manifest(path: Union[str, os.PathLike]) -> Dict[str, str]:
    meta = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                key, _, val = line.partition("=")
                meta[key.strip()] = val.strip()
    return meta


def read_corpus(directory: Union[str, os.PathLike]) -> List[CorpusEntry]:
    """All ``.emd`` files of a directory, sorted by id, with manifests when present."""
    out = []
    for name in sorted(os.listdir(directory)):
        if not name.endswith(".emd"):
            continue
        iid = name[:-4]
        spec_path = os.path.join(directory, iid + ".spec")
        meta = read_manifest(spec_path) if os.path.exists(spec_path) else {}
        out.append(CorpusEntry(iid, emd.load(os.path.join(directory, name)), meta))
    return out


def corpus_entries(specs: Sequence[InstanceSpec]) -> List[CorpusEntry]:
    return [CorpusEntry(f"{k:03d}-{s.label}", generate(s), _spec_to_meta(s)) for k, s in enumerate(specs)]


# -- experiment -------------------------------------------------------------------------


def _ratio(a, b) -> str:
    if a is None or b is None or b == 0 or a is INF or b is INF:
        return ""
    return f"{float(Fraction(a) / Fraction(b)):.6f}"


def run_row(entry: CorpusEntry, config: ExperimentConfig) -> Dict[str, str]:
    g = entry.graph
    row = {c: "" for c in CSV_COLUMNS}
    row.update(
        version=REPORT_VERSION,
        instance=entry.id,
        family=entry.meta.get("family", ""),
        n_vertices=str(len(g)),
        n_arcs=str(g.num_arcs),
    )
    timing = {}
    try:
        row["genus"] = str(genus(g))
        t = time.perf_counter()
        cert = solve(g, config.solver)
        timing["solve"] = time.perf_counter() - t
        lp = cert.lp_bound
        row.update(
            lp=str(lp),
            cost=format_cost(cert.cost),
            cost_over_lp=_ratio(cert.cost, lp),
            valid=str(cert.valid).lower(),
            branches="/".join(sorted({n.branch for n in cert.recursion_tree})),
            fallbacks=str(cert.fallbacks),
        )
        opt = None
        if len(g) <= config.oracle_cap:
            t = time.perf_counter()
            opt = exact_dfvs(g, config.oracle_cap).optimum
            timing["oracle"] = time.perf_counter() - t
            row["exact_opt"] = format_cost(opt)
            row["cost_over_opt"] = _ratio(cert.cost, opt)
            row["sandwich"] = str(lp <= opt <= cert.cost).lower()
        if len(g) <= config.packing_cap:
            t = time.perf_counter()
            pack = max_dicycle_packing(g, config.packing_cap).optimum
            timing["packing"] = time.perf_counter() - t
            row["packing"] = str(pack)
            # packing counts cycles, so the ratio only means something under unit costs
            if opt is not None and pack and all(c == 1 for c in g.costs.values()):
                row["opt_over_packing"] = _ratio(opt, pack)
    except SolveAborted as exc:
        row["error"] = f"abort: {exc}"
    except Exception as exc:  # recorded per row; the run continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    row["timing"] = ";".join(f"{k}={v:.4f}" for k, v in timing.items()) + f";at={stamp}"
    return row


def run_experiment(
    corpus: Iterable[CorpusEntry], config: Optional[ExperimentConfig] = None, out: Optional[TextIO] = None
) -> List[Dict[str, str]]:
    """One CSV row per instance in id order. Everything except ``timing`` is deterministic."""
    config = config or ExperimentConfig()
    rows = [run_row(e, config) for e in sorted(corpus, key=lambda e: e.id)]
    if out is not None:
        write_csv(rows, out)
    return rows


def write_csv(rows: Sequence[Dict[str, str]], out: TextIO) -> None:
    w = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)


def csv_text(rows: Sequence[Dict[str, str]]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
