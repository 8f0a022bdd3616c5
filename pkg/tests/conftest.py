from __future__ import annotations

from fractions import Fraction
from typing import Dict, Sequence, Tuple

import pytest

from genus_dfvs.embedded_digraph import Arc, Dart, EmbeddedDigraph
from genus_dfvs.generators import directed_cycle, toroidal_grid

# criterion number -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE: Dict[int, Tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")


def build(rotation: Dict[int, Sequence[str]], arcs: Dict[int, Tuple[int, int]], costs=None) -> EmbeddedDigraph:
    """Map from dart strings like ``"+3"``/``"-3"``."""
    rot = {v: tuple(Dart(int(d[1:]), 1 if d[0] == "+" else -1) for d in ds) for v, ds in rotation.items()}
    costs = costs or {v: 1 for v in rotation}
    return EmbeddedDigraph(costs, {a: Arc(*ta) for a, ta in arcs.items()}, rot)


def bidirected_triangle() -> EmbeddedDigraph:
    """Planar: three digon faces and both orientations of the triangle as faces."""
    return build(
        {0: ["+0", "-1", "+5", "-4"], 1: ["+1", "-0", "+2", "-3"], 2: ["+3", "-2", "+4", "-5"]},
        {0: (0, 1), 1: (1, 0), 2: (1, 2), 3: (2, 1), 4: (2, 0), 5: (0, 2)},
    )


def triangle_with_pendant() -> EmbeddedDigraph:
    """Dicycle 0->1->2->0 plus a pendant path 2->3->4."""
    return build(
        {0: ["-2", "+0"], 1: ["-0", "+1"], 2: ["-1", "+2", "+3"], 3: ["-3", "+4"], 4: ["-4"]},
        {0: (0, 1), 1: (1, 2), 2: (2, 0), 3: (2, 3), 4: (3, 4)},
    )


def two_triangles_joined() -> EmbeddedDigraph:
    """Triangles 0-1-2 and 3-4-5 with a single arc 2->3."""
    return build(
        {
            0: ["-2", "+0"],
            1: ["-0", "+1"],
            2: ["-1", "+2", "+6"],
            3: ["-5", "+3", "-6"],
            4: ["-3", "+4"],
            5: ["-4", "+5"],
        },
        {0: (0, 1), 1: (1, 2), 2: (2, 0), 3: (3, 4), 4: (4, 5), 5: (5, 3), 6: (2, 3)},
    )


def two_triangles_sharing_vertex() -> EmbeddedDigraph:
    """Triangles 0-1-2 and 0-3-4 sharing vertex 0."""
    return build(
        {0: ["-2", "+0", "-5", "+3"], 1: ["-0", "+1"], 2: ["-1", "+2"], 3: ["-3", "+4"], 4: ["-4", "+5"]},
        {0: (0, 1), 1: (1, 2), 2: (2, 0), 3: (0, 3), 4: (3, 4), 5: (4, 0)},
    )


def dag4() -> EmbeddedDigraph:
    return build(
        {0: ["+0", "+1"], 1: ["-0", "+2"], 2: ["-1", "-2", "+3"], 3: ["-3"]},
        {0: (0, 1), 1: (0, 2), 2: (1, 2), 3: (2, 3)},
    )


def close_fixture() -> Tuple[EmbeddedDigraph, Dict[int, Fraction]]:
    """12 vertices: tight 6-cycle 0..5 with three two-vertex bypasses.

    Bypass 5 -> 6 -> 7 -> 0 leaves on the left and enters on the right, as does
    0 -> 8 -> 9 -> 1, so a zero-weight U->W path ends at position 0 and another
    starts there: the CLOSE branch. Bypass 2 -> 10 -> 11 -> 3 uses the other
    pair of sides. Values 1/6 on the cycle are an optimal LP point.
    """
    arcs = {k: (k, (k + 1) % 6) for k in range(6)}
    arcs.update({6: (5, 6), 7: (6, 7), 8: (7, 0), 9: (0, 8), 10: (8, 9), 11: (9, 1), 12: (2, 10), 13: (10, 11), 14: (11, 3)})
    # at cycle vertex k: incoming cycle dart, left darts, outgoing cycle dart, right darts
    rotation = {
        0: ["-5", "+9", "+0", "-8"],
        1: ["-0", "+1", "-11"],
        2: ["-1", "+2", "+12"],
        3: ["-2", "-14", "+3"],
        4: ["-3", "+4"],
        5: ["-4", "+6", "+5"],
        6: ["-6", "+7"],
        7: ["-7", "+8"],
        8: ["-9", "+10"],
        9: ["-10", "+11"],
        10: ["-12", "+13"],
        11: ["-13", "+14"],
    }
    g = build(rotation, arcs)
    x = {v: Fraction(1, 6) if v < 6 else Fraction(0) for v in g.costs}
    return g, x


@pytest.fixture
def c3x3() -> EmbeddedDigraph:
    return toroidal_grid(3)


@pytest.fixture
def triangle() -> EmbeddedDigraph:
    return directed_cycle(3)


def two_disjoint_triangles() -> EmbeddedDigraph:
    from genus_dfvs.embedded_digraph import disjoint_union

    return disjoint_union([directed_cycle(3), directed_cycle(3)])
