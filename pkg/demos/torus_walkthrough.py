"""Walk a toroidal grid through every stage of the pipeline.

    python3 demos/torus_walkthrough.py [n]
"""

from __future__ import annotations

import sys

from genus_dfvs import emd
from genus_dfvs.dfvs_lp import solve_lp
from genus_dfvs.embedded_digraph import face_minimal_dicycles, genus, residual_graph, trace_faces
from genus_dfvs.facial_hitter import run as hit_facial
from genus_dfvs.generators import toroidal_grid
from genus_dfvs.genus_solver import solve
from genus_dfvs.oracle import exact_dfvs, max_dicycle_packing
from genus_dfvs.separator import round_heavy


def main(n: int = 4) -> None:
    g = toroidal_grid(n)
    print(f"C{n} x C{n}: |V|={len(g)} |A|={g.num_arcs} faces={len(trace_faces(g))} genus={genus(g)}")
    print(emd.dumps(g).splitlines()[-1], "  (last rotation line)")

    print(f"face-minimal dicycles: {len(face_minimal_dicycles(g))} (grid squares alternate direction)")
    hit = hit_facial(g)
    print(f"facial hitter: S={sorted(hit.S)} dual={hit.dual_value}")

    sol = solve_lp(residual_graph(g, hit.S))
    print(f"LP optimum {sol.objective} after {sol.rounds} cutting-plane rounds, pool {len(sol.active_cycles)}")
    print("support:", {v: str(x) for v, x in sol.x.items() if x})

    heavy = round_heavy(residual_graph(g, hit.S))
    print(f"heavy rounding: F={list(heavy.F)} cost {heavy.cost} <= 24 * {heavy.root_lp}; residual |V|={len(heavy.graph)}")

    cert = solve(g)
    print(f"solve: cost {cert.cost}, lp bound {cert.lp_bound}, valid {cert.valid}")
    print("phases:", {k: str(v) for k, v in cert.phase_attribution.items()})
    if len(g) <= 18:
        print(f"exact optimum {exact_dfvs(g).optimum}")
    if len(g) <= 14:
        print(f"max dicycle packing {max_dicycle_packing(g).optimum}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 4)
