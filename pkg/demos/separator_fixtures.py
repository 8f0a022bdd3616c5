"""The separator on hand-picked LP points: FAR on uniform tori, CLOSE on a 12-vertex map.

Extreme-point LP solutions on the corpus are nearly integral, so heavy
rounding clears them before the separator is needed. These fixtures feed
chosen optimal values instead.

    python3 demos/separator_fixtures.py
"""

from __future__ import annotations

import json
import os
from fractions import Fraction

from genus_dfvs import emd
from genus_dfvs.dfvs_lp import solution_from_values, solve_lp
from genus_dfvs.generators import toroidal_grid
from genus_dfvs.separator import build_ports, plan, tight_cycle, undirected_sides_separated

HERE = os.path.dirname(os.path.abspath(__file__))


def show(name, g, x):
    sol = solution_from_values(g, x)
    assert sol.objective == solve_lp(g).objective, "values must be optimal"
    ports = build_ports(g, tight_cycle(g, sol))
    sp = plan(ports, sol)
    print(f"== {name}: LP {sol.objective}, N={sol.N}, epsN={sol.eps_n}")
    print(f"   ports {[(p.kind, p.position) for p in ports.ports]}")
    print(f"   branch {sp.branch.value}, removed {sorted(sp.removed)}")
    for a in sp.layer_audit:
        print(f"   {a.family:10s} layer {a.chosen_index} cost {a.chosen_cost}, family total {a.total_cost} <= {a.bound}")
    if sp.witnesses:
        print("   witnesses", json.dumps({k: list(v) for k, v in sp.witnesses.items()}))
    print(f"   W+D and U+B separated in every residual component: {undirected_sides_separated(ports, sp.removed)}")


def main() -> None:
    for n in (3, 5):
        g = toroidal_grid(n)
        show(f"uniform C{n} x C{n}", g, {v: Fraction(1, n) for v in g.vertices})
    g = emd.load(os.path.join(HERE, "data", "close12.emd"))
    show("close12", g, {v: Fraction(1, 6) if v < 6 else Fraction(0) for v in g.vertices})


if __name__ == "__main__":
    main()
