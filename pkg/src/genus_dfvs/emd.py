"""Reading and writing the ``.emd`` text format.

::

    emd <V> <A>
    v <id> <cost|inf>
    a <id> <tail> <head>
    r <id> <dart> <dart> ...

Darts are written ``+<arc>`` (tail end) or ``-<arc>`` (head end), in rotation
order. Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import os
from typing import Dict, TextIO, Tuple, Union

from .costs import format_cost, parse_cost
from .embedded_digraph import Arc, Dart, EmbeddedDigraph, MapError


class EmdParseError(MapError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _parse_dart(tok: str, lineno: int) -> Dart:
    if len(tok) < 2 or tok[0] not in "+-":
        raise EmdParseError(lineno, f"bad dart {tok!r} (expected +<arc> or -<arc>)")
    try:
        return Dart(int(tok[1:]), 1 if tok[0] == "+" else -1)
    except ValueError:
        raise EmdParseError(lineno, f"bad dart {tok!r}") from None


def loads(text: str) -> EmbeddedDigraph:
    header = None
    costs: Dict[int, object] = {}
    arcs: Dict[int, Arc] = {}
    rotation: Dict[int, Tuple[Dart, ...]] = {}
    dart_line: Dict[Dart, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        try:
            if kind == "emd":
                if header is not None:
                    raise EmdParseError(lineno, "second header")
                header = (int(tok[1]), int(tok[2]))
            elif header is None:
                raise EmdParseError(lineno, "missing 'emd <V> <A>' header")
            elif kind == "v":
                v = int(tok[1])
                if v in costs:
                    raise EmdParseError(lineno, f"duplicate vertex {v}")
                costs[v] = parse_cost(tok[2])
            elif kind == "a":
                a = int(tok[1])
                if a in arcs:
                    raise EmdParseError(lineno, f"duplicate arc {a}")
                arcs[a] = Arc(int(tok[2]), int(tok[3]))
            elif kind == "r":
                v = int(tok[1])
                if v in rotation:
                    raise EmdParseError(lineno, f"second rotation for vertex {v}")
                darts = []
                for t in tok[2:]:
                    d = _parse_dart(t, lineno)
                    if d in dart_line:
                        raise EmdParseError(
                            lineno, f"duplicate dart {t} (first seen on line {dart_line[d]})"
                        )
                    dart_line[d] = lineno
                    darts.append(d)
                rotation[v] = tuple(darts)
            else:
                raise EmdParseError(lineno, f"unknown record {kind!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, EmdParseError):
                raise
            raise EmdParseError(lineno, f"malformed record: {raw.strip()!r} ({exc})") from None
    if header is None:
        raise EmdParseError(0, "empty file")
    if header != (len(costs), len(arcs)):
        raise EmdParseError(1, f"header says {header}, found {len(costs)} vertices / {len(arcs)} arcs")
    for v in costs:
        rotation.setdefault(v, ())
    return EmbeddedDigraph(costs, arcs, rotation)


def dumps(g: EmbeddedDigraph) -> str:
    lines = [f"emd {len(g)} {g.num_arcs}"]
    for v in g.vertices:
        lines.append(f"v {v} {format_cost(g.costs[v])}")
    for a in sorted(g.arcs):
        t, h = g.arcs[a]
        lines.append(f"a {a} {t} {h}")
    for v in g.vertices:
        lines.append(" ".join([f"r {v}"] + [str(d) for d in g.rotation[v]]))
    return "\n".join(lines) + "\n"


def load(path: Union[str, os.PathLike, TextIO]) -> EmbeddedDigraph:
    if hasattr(path, "read"):
        return loads(path.read())
    with open(path) as fh:
        return loads(fh.read())


def dump(g: EmbeddedDigraph, path: Union[str, os.PathLike]) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(g))
