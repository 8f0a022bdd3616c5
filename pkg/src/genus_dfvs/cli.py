"""Command line interface: ``genus-dfvs <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from . import emd
from .costs import format_cost
from .dfvs_lp import DEFAULT_EPSILON, solve_lp
from .embedded_digraph import MapError, genus, residual_graph
from .facial_hitter import HitterInfeasibleError, run as hit_facial, verify_certificate, write_trace
from .genus_solver import SolveAborted, SolverConfig, solve
from .harness import ExperimentConfig, default_corpus, read_corpus, run_experiment, write_corpus
from .oracle import DFVS_CAP, PACKING_CAP, OracleCapError, enumerate_dicycles, exact_dfvs, max_dicycle_packing
from .separator import HEAVY_THRESHOLD, build_ports, plan, round_heavy, tight_cycle

EXIT_OK, EXIT_ERROR, EXIT_ABORT = 0, 1, 2


def _fraction(text: str) -> Fraction:
    try:
        val = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected p/q, got {text!r}") from None
    if not 0 < val < 1:
        raise argparse.ArgumentTypeError("epsilon must lie strictly between 0 and 1")
    return val


def _cmd_lp(args) -> int:
    g = emd.load(args.file)
    sol = solve_lp(g, exact=not args.float, epsilon=args.epsilon)
    print(f"objective {sol.objective}")
    print(f"mode {'exact' if sol.exact else 'float (approximate)'}")
    for v in sorted(sol.x):
        if sol.x[v]:
            print(f"x[{v}] = {sol.x[v]}")
    print(f"N {sol.N}")
    print(f"epsN {sol.eps_n}")
    print(f"pool {len(sol.active_cycles)}")
    return EXIT_OK


def _cmd_hit(args) -> int:
    g = emd.load(args.file)
    r = hit_facial(g)
    rep = verify_certificate(g, r)
    print(f"S {sorted(r.S)}")
    print(f"cost {format_cost(r.cost)}")
    print(f"dual {r.dual_value}")
    print(f"iterations {len(r.iterations)}")
    for name, ok in rep.checks.items():
        print(f"check {name}: {'pass' if ok else 'FAIL'}")
    for msg in rep.failures:
        print(f"  {msg}")
    if args.emit_trace:
        with open(args.emit_trace, "w") as fh:
            write_trace(r, fh)
    return EXIT_OK if rep.ok else EXIT_ERROR


def _cmd_plan(args) -> int:
    g = emd.load(args.file)
    r = hit_facial(g)
    h = residual_graph(g, r.S)
    heavy = round_heavy(h, args.heavy_threshold, args.epsilon)
    out = {"facial": sorted(r.S), "heavy": list(heavy.F)}
    c1 = tight_cycle(heavy.graph, heavy.solution) if len(heavy.graph) else None
    if c1 is None:
        out["branch"] = "DONE"
    else:
        out.update(plan(build_ports(heavy.graph, c1), heavy.solution).to_json())
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        print(f"branch {out['branch']}")
        print(f"facial {out['facial']}")
        print(f"heavy {out['heavy']}")
        if c1 is not None:
            print(f"cycle {out['cycle']}")
            print(f"removed {out['removed']}")
            print(f"N {out['N']} epsN {out['epsN']} lp {out['lp']}")
            for a in out["layer_audit"]:
                print(
                    f"layer {a['family']}: index {a['index']} cost {a['chosen_cost']} "
                    f"sum {a['total_cost']} <= {a['bound_N_lp']} {'ok' if a['sum_ok'] and a['chosen_ok'] else 'FAIL'}"
                )
    return EXIT_OK


def _cmd_solve(args) -> int:
    g = emd.load(args.file)
    cfg = SolverConfig(epsilon=args.epsilon, heavy_threshold=args.heavy_threshold, oracle_cap=args.oracle_cap)
    try:
        cert = solve(g, cfg)
    except SolveAborted as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        if args.bundle:
            exc.dump(args.bundle)
            print(f"diagnostic bundle written to {args.bundle}", file=sys.stderr)
        else:
            print(json.dumps(exc.bundle, indent=2), file=sys.stderr)
        return EXIT_ABORT
    if args.json:
        print(json.dumps(cert.to_json(), indent=2))
    else:
        print(f"solution {sorted(cert.solution)}")
        print(f"cost {format_cost(cert.cost)}")
        print(f"lp_bound {cert.lp_bound}")
        for k, v in cert.phase_attribution.items():
            print(f"phase {k} {format_cost(v)}")
        print(f"nodes {len(cert.recursion_tree)} fallbacks {cert.fallbacks}")
        print(f"valid {str(cert.valid).lower()}")
    return EXIT_OK if cert.valid else EXIT_ERROR


def _cmd_oracle(args) -> int:
    g = emd.load(args.file)
    try:
        if args.problem == "dfvs":
            res = exact_dfvs(g, args.cap or DFVS_CAP)
            print(f"optimum {format_cost(res.optimum)}")
            print(f"solution {sorted(res.solution)}")
            print(f"nodes {res.nodes}")
        elif args.problem == "pack":
            res = max_dicycle_packing(g, args.cap or PACKING_CAP)
            print(f"packing {res.optimum}")
            print(f"vertices {sorted(res.solution)}")
        else:
            cycles = enumerate_dicycles(g, args.cap or DFVS_CAP)
            print(f"cycles {len(cycles)}")
            for c in cycles:
                print(" ".join(map(str, c.vertices)))
    except OracleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def _cmd_bench(args) -> int:
    corpus = read_corpus(args.corpus)
    cfg = ExperimentConfig(oracle_cap=args.oracle_cap, packing_cap=min(args.oracle_cap, PACKING_CAP))
    with open(args.out, "w") as fh:
        rows = run_experiment(corpus, cfg, fh)
    bad = [r["instance"] for r in rows if r["error"] or r["valid"] != "true"]
    print(f"{len(rows)} instances, {len(bad)} failures -> {args.out}")
    for iid in bad:
        print(f"  {iid}")
    return EXIT_OK if not bad else EXIT_ERROR


def _cmd_make_corpus(args) -> int:
    ids = write_corpus(default_corpus(), args.dir)
    print(f"wrote {len(ids)} instances to {args.dir}")
    return EXIT_OK


def _cmd_genus(args) -> int:
    g = emd.load(args.file)
    print(genus(g))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="genus-dfvs", description="DFVS on surface-embedded digraphs")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lp", help="solve the covering LP by cutting planes")
    s.add_argument("file")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--float", action="store_true")
    s.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON)
    s.set_defaults(func=_cmd_lp)

    s = sub.add_parser("hit-facial", help="primal-dual hitting of facial dicycles")
    s.add_argument("file")
    s.add_argument("--emit-trace", metavar="PATH")
    s.set_defaults(func=_cmd_hit)

    s = sub.add_parser("separate-plan", help="one separator step after facial hitting and heavy rounding")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON)
    s.add_argument("--heavy-threshold", type=Fraction, default=HEAVY_THRESHOLD)
    s.set_defaults(func=_cmd_plan)

    s = sub.add_parser("solve", help="full pipeline with certificate")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.add_argument("--oracle-cap", type=int, default=DFVS_CAP)
    s.add_argument("--epsilon", type=_fraction, default=DEFAULT_EPSILON)
    s.add_argument("--heavy-threshold", type=Fraction, default=HEAVY_THRESHOLD)
    s.add_argument("--bundle", metavar="PATH", help="where to write the diagnostic bundle on abort")
    s.set_defaults(func=_cmd_solve)

    s = sub.add_parser("oracle", help="exact references")
    s.add_argument("problem", choices=("dfvs", "pack", "cycles"))
    s.add_argument("file")
    s.add_argument("--cap", type=int)
    s.set_defaults(func=_cmd_oracle)

    s = sub.add_parser("bench", help="run the experiment over a corpus directory")
    s.add_argument("--corpus", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--oracle-cap", type=int, default=14)
    s.set_defaults(func=_cmd_bench)

    s = sub.add_parser("make-corpus", help="write the default corpus to a directory")
    s.add_argument("dir")
    s.set_defaults(func=_cmd_make_corpus)

    s = sub.add_parser("genus", help="print the genus of an embedded digraph")
    s.add_argument("file")
    s.set_defaults(func=_cmd_genus)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MapError, HitterInfeasibleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
