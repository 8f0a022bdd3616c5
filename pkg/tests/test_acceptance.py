"""Acceptance criteria 1-8 over the default corpus.

Each test records a one-line verdict in ``conftest.ACCEPTANCE``; the lines are
printed in the terminal summary and also written to stdout (visible with -s).
"""

from __future__ import annotations

import json
import os
import random
import statistics
import time
from fractions import Fraction as F

import pytest

import conftest
from conftest import close_fixture
from genus_dfvs.dfvs_lp import separate, solution_from_values, solve_lp, violated_cycles
from genus_dfvs.embedded_digraph import classify_sides, dicycle_from_vertices, genus, residual_graph
from genus_dfvs.facial_hitter import run as hit_facial, verify_certificate
from genus_dfvs.generators import Family, InstanceSpec, generate, random_rotation_digraph, toroidal_grid
from genus_dfvs.genus_solver import SolveAborted, solve
from genus_dfvs.harness import corpus_entries, default_corpus
from genus_dfvs.oracle import enumerate_dicycles, exact_dfvs, exhaustive_hitting_set, max_dicycle_packing
from genus_dfvs.separator import WitnessError, build_ports, plan, tight_cycle

EPS = F(1, 12)
BUNDLE_DIR = os.environ.get("DFVS_BUNDLE_DIR", "counterexamples")


def record(k: int, ok: bool, detail: str) -> None:
    conftest.ACCEPTANCE[k] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")


@pytest.fixture(scope="module")
def corpus():
    return corpus_entries(default_corpus())


@pytest.fixture(scope="module")
def solved(corpus):
    """``(entry, certificate or SolveAborted)`` for every instance, plus total solve seconds."""
    out = []
    t0 = time.perf_counter()
    for e in corpus:
        try:
            out.append((e, solve(e.graph)))
        except SolveAborted as exc:
            out.append((e, exc))
    return out, time.perf_counter() - t0


def test_criterion_1_validity(solved):
    results, seconds = solved
    certs = [c for _e, c in results if not isinstance(c, SolveAborted)]
    valid = sum(1 for c in certs if c.valid)
    ok = len(results) >= 200 and valid == len(results) and seconds < 60
    record(1, ok, f"{valid}/{len(results)} valid, solve time {seconds:.1f}s (< 60s)")
    assert ok


def test_criterion_2_oracle_sandwich(solved):
    results, _ = solved
    checked = cross = 0
    bad = []
    for e, cert in results:
        g = e.graph
        if len(g) > 14 or isinstance(cert, SolveAborted):
            continue
        opt = exact_dfvs(g, cap=14).optimum
        checked += 1
        if not cert.lp_bound <= opt <= cert.cost:
            bad.append(e.id)
        if len(g) <= 10:
            cross += 1
            if exhaustive_hitting_set(g).optimum != opt:
                bad.append(e.id + " (exhaustive)")
    ok = not bad and checked > 0
    record(2, ok, f"lp <= opt <= cost on {checked} instances, exhaustive agreement on {cross}; failures {bad}")
    assert ok


def test_criterion_3_primal_dual_certificate(corpus):
    bad = []
    planar = 0
    for e in corpus:
        r = hit_facial(e.graph)
        rep = verify_certificate(e.graph, r)
        needed = ["dual_feasible", "tight", "debit_bound"]
        if r.genus == 0:
            needed.append("planar_bound")
            planar += 1
        if not all(rep.checks[k] for k in needed):
            bad.append((e.id, rep.failures))
    ok = not bad
    record(3, ok, f"certificates pass on {len(corpus)} instances ({planar} planar with cost <= 3 * dual); failures {len(bad)}")
    assert ok, bad


def test_criterion_4_lp_correctness(corpus):
    rng = random.Random(4)
    bad = []
    walks = 0
    for e in corpus:
        g = e.graph
        exact = solve_lp(g)
        if separate(g, exact.x) is not None:
            bad.append(e.id + " exact")
        approx = solve_lp(g, exact=False)
        if separate(g, approx.x, tol=1e-7) is not None:
            bad.append(e.id + " float")
        # sampled dicycles: full enumeration when small, else separation under random values
        if len(g) <= 12:
            sample = enumerate_dicycles(g)[:40]
        else:
            noise = {v: F(rng.randint(0, 5), 12) for v in g.vertices}
            sample = violated_cycles(g, noise, limit=20) + violated_cycles(g, {}, limit=20)
        for c in sample:
            walks += 1
            if sum(exact.w[v] for v in c.vertices) < exact.N:
                bad.append(f"{e.id} walk {c.vertices}")
    ok = not bad
    record(4, ok, f"separation finds nothing in exact and float mode on {len(corpus)} instances; {walks} sampled dicycles weigh >= N")
    assert ok, bad


def _separator_fixtures():
    """LP points that reach the separator: uniform tori and the CLOSE fixture."""
    out = []
    for n in range(3, 9):
        g = toroidal_grid(n)
        out.append((f"torus{n}", g, solution_from_values(g, {v: F(1, n) for v in g.vertices}, EPS)))
    g, x = close_fixture()
    out.append(("close12", g, solution_from_values(g, x, EPS)))
    return out


def test_criterion_5_layer_audits(corpus, solved):
    results, _ = solved
    bad = []
    corpus_plans = heavy = 0
    for e, cert in results:
        if isinstance(cert, SolveAborted):
            continue
        corpus_plans += len({n for n, _a in cert.layer_audits})
        for _n, a in cert.layer_audits:
            if not (a.sum_ok and a.chosen_ok):
                bad.append(f"{e.id} {a.family}")
        for h in cert.heavy_audits:
            heavy += 1
            if not (h.cost <= 24 * h.lp):
                bad.append(f"{e.id} heavy {h.cost} > 24 * {h.lp}")
    # the separator on the unrounded residual of every corpus instance
    sweep = {"FAR": 0, "CLOSE": 0, "witness": 0}
    for e in corpus:
        h = residual_graph(e.graph, hit_facial(e.graph).S)
        if not len(h):
            continue
        sol = solve_lp(h)
        try:
            sp = plan(build_ports(h, tight_cycle(h, sol)), sol, check=False)
        except WitnessError:
            sweep["witness"] += 1
            continue
        sweep[sp.branch.value] += 1
        if not sp.audits_ok:
            bad.append(f"{e.id} sweep")
    fixtures = []
    for name, g, sol in _separator_fixtures():
        sp = plan(build_ports(g, tight_cycle(g, sol)), sol)
        fixtures.append(f"{name}:{sp.branch.value}")
        if not sp.audits_ok or any(a.count != sol.eps_n for a in sp.layer_audit):
            bad.append(name)
    ok = not bad
    record(
        5,
        ok,
        f"{corpus_plans} solver plans, {heavy} heavy audits <= 24*LP, unrounded sweep {sweep}, "
        f"fixtures {' '.join(fixtures)}",
    )
    assert ok, bad


PINNED_GENUS = {0: 1, 1: 1, 2: 2, 3: 2, 4: 2}


def test_criterion_6_genus_machinery(corpus):
    bad = []
    planar = tori = 0
    for e in corpus:
        fam = e.meta["family"]
        if fam == Family.PLANAR.value:
            planar += 1
            if genus(e.graph) != 0:
                bad.append(e.id)
        elif fam == Family.TOROIDAL_GRID.value:
            tori += 1
            if genus(e.graph) != 1:
                bad.append(e.id)
    for seed, expected in PINNED_GENUS.items():
        if genus(generate(InstanceSpec(Family.RANDOM_ROTATION, {"n": 6, "extra": 3}, seed))) != expected:
            bad.append(f"pinned seed {seed}")
    rng = random.Random(6)
    fuzz = 0
    while fuzz < 500:
        n = rng.randint(2, 20)
        g = random_rotation_digraph(n, rng.randint(0, 10), rng)
        c = dicycle_from_vertices(g, [g.arcs[k].tail for k in range(n)]).rerooted(rng.randrange(n))
        base = classify_sides(g, c)
        if classify_sides(g.mirrored(), c) != {d: s.flipped() for d, s in base.items()}:
            bad.append(f"fuzz {fuzz}")
        fuzz += 1
    ok = not bad
    record(6, ok, f"planar {planar} -> 0, toroidal {tori} -> 1, pinned 5/5, classify_sides symmetric on {fuzz} fuzz cases")
    assert ok, bad


def test_criterion_7_recursion_soundness(solved):
    results, _ = solved
    aborts = [(e, c) for e, c in results if isinstance(c, SolveAborted)]
    if aborts:
        os.makedirs(BUNDLE_DIR, exist_ok=True)
        for e, exc in aborts:
            exc.dump(os.path.join(BUNDLE_DIR, f"{e.id}.json"))
    certs = [c for _e, c in results if not isinstance(c, SolveAborted)]
    edges = sum(len(c.edges()) for c in certs)
    monotone = all(c.monotone for c in certs)
    fallbacks = sum(c.fallbacks for c in certs)
    ok = monotone and not aborts
    record(7, ok, f"{edges} recursion edges all decrease (genus, |V|); aborts {len(aborts)}, oracle fallbacks {fallbacks}")
    assert ok, [e.id for e, _c in aborts]


def test_criterion_8_packing_probe(corpus):
    ratios = []
    bad = []
    for e in corpus:
        g = e.graph
        if len(g) > 14:
            continue
        unit = g.with_costs({v: 1 for v in g.vertices})
        pack = max_dicycle_packing(unit, cap=14).optimum
        opt = exact_dfvs(unit, cap=14).optimum
        if pack > opt:
            bad.append(e.id)
        if pack:
            ratios.append(F(opt, pack))
    ok = not bad and bool(ratios)
    detail = (
        f"packing <= opt on {len(ratios)} cyclic instances; opt/packing max {float(max(ratios)):.3f}, "
        f"mean {statistics.mean(float(r) for r in ratios):.3f}"
        if ratios
        else "no cyclic instance under the cap"
    )
    record(8, ok, detail)
    assert ok, bad


def test_acceptance_summary_is_serializable():
    json.dumps({k: list(v) for k, v in conftest.ACCEPTANCE.items()})
