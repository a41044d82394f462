"""Planar diagram (PD) codes for knots and links.

A diagram with n crossings is given as n tokens ``X(a,b,c,d)`` where
a,b,c,d are positive arc labels listed counterclockwise starting from
the incoming under-strand.  Tokens are separated by whitespace or
commas, and ``#`` starts a comment running to end of line.  Every arc
label must occur exactly twice in the whole code.

The four positions of a crossing are its *slots* 0..3: slot 0 is the
incoming under-arc, slot 2 the outgoing under-arc, and slots 1, 3 the
over-strand.  Walking a strand through a crossing enters at slot s and
leaves at slot (s + 2) mod 4.

The slot order doubles as a rotation system: the arcs leave each
crossing counterclockwise in PD order, which pins a combinatorial
embedding.  Faces are traced from that embedding; Euler's formula
decides planarity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .errors import Disconnected, LabelError, NonPlanar, Nugatory, PDSyntaxError

_TOKEN = re.compile(r"X\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)")


@dataclass(frozen=True)
class Diagram:
    """A validated PD code.

    crossings[x] is the (a,b,c,d) label tuple of crossing x; arcs maps
    each label to its two endpoints (crossing, slot) in reading order.
    """

    crossings: Tuple[Tuple[int, int, int, int], ...]
    arcs: Dict[int, Tuple[Tuple[int, int], Tuple[int, int]]] = field(compare=False)

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def arc_labels(self) -> List[int]:
        return sorted(self.arcs)

    def other_end(self, label: int, end: Tuple[int, int]) -> Tuple[int, int]:
        e0, e1 = self.arcs[label]
        return e1 if end == e0 else e0

    def serialize(self) -> str:
        return " ".join(f"X({a},{b},{c},{d})" for a, b, c, d in self.crossings)


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_pd(text: str) -> Diagram:
    """Parse and validate a PD code.

    Raises:
        PDSyntaxError: a token is not of the form X(a,b,c,d) or a label
            is not a positive integer.
        LabelError: some arc label does not occur exactly twice.
        Nugatory: a crossing uses the same label twice.
        Disconnected: the diagram splits into unconnected pieces.
        NonPlanar: the counterclockwise slot order at the crossings
            admits no embedding in the sphere.
    """
    body = _strip_comments(text)
    crossings: List[Tuple[int, int, int, int]] = []
    pos = 0
    for chunk in re.split(r"[\s,]*(X\([^)]*\))[\s,]*", body):
        if not chunk.strip():
            continue
        m = _TOKEN.fullmatch(chunk.strip())
        if m is None:
            raise PDSyntaxError(f"unparseable token {chunk.strip()!r}")
        labels = tuple(int(g) for g in m.groups())
        if any(v <= 0 for v in labels):
            raise PDSyntaxError(f"labels must be positive integers: {chunk.strip()!r}")
        crossings.append(labels)
        pos += 1
    if not crossings:
        raise PDSyntaxError("no crossings found")

    counts: Dict[int, List[Tuple[int, int]]] = {}
    for x, row in enumerate(crossings):
        if len(set(row)) != 4:
            raise Nugatory(f"crossing {x} reuses an arc label: {row}")
        for slot, label in enumerate(row):
            counts.setdefault(label, []).append((x, slot))
    bad = {lbl: len(ends) for lbl, ends in counts.items() if len(ends) != 2}
    if bad:
        raise LabelError(f"labels without exactly two occurrences: {bad}")

    arcs = {lbl: (ends[0], ends[1]) for lbl, ends in counts.items()}
    diagram = Diagram(crossings=tuple(crossings), arcs=arcs)

    # Connectivity of the underlying 4-valent graph.
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for label in crossings[x]:
            for cx, _ in arcs[label]:
                if cx not in seen:
                    seen.add(cx)
                    stack.append(cx)
    if len(seen) != len(crossings):
        raise Disconnected(f"only {len(seen)} of {len(crossings)} crossings reachable")

    # Euler check of the rotation-system embedding.
    v, e, f = len(crossings), 2 * len(crossings), len(faces(diagram))
    if v - e + f != 2:
        raise NonPlanar(f"Euler characteristic {v - e + f} != 2")
    return diagram


# ---------------------------------------------------------------------------
# combinatorial maps
#
# A map is a set of darts (arc ends) with an involution theta pairing
# the two ends of each edge and a permutation rho rotating the darts
# counterclockwise around their vertex.  Faces are the orbits of
# h -> theta(rho(h)); this walks each bounded region once.  The same
# machinery serves the diagram (a 4-valent multigraph) and the
# patchwork built on top of it.


def trace_map_faces(
    rho_next: Dict[object, object], theta: Dict[object, object]
) -> List[List[object]]:
    """Orbits of theta(rho(.)) over all darts, each orbit as a dart list."""
    faces_out: List[List[object]] = []
    unused = set(rho_next)
    while unused:
        start = min(unused, key=_dart_key)
        orbit = []
        h = start
        while True:
            orbit.append(h)
            unused.discard(h)
            h = theta[rho_next[h]]
            if h == start:
                break
        faces_out.append(orbit)
    return faces_out


def _dart_key(d: object):
    return (str(type(d)), repr(d))


def faces(diagram: Diagram) -> List[List[int]]:
    """Faces of the diagram's sphere embedding, as arc-label walks.

    Each face is the cyclic list of arc labels along its boundary.  The
    count feeds the Euler planarity check; the walks themselves are
    useful when hunting for a diagram's regions.
    """
    rho = {}
    theta = {}
    for x, row in enumerate(diagram.crossings):
        for slot in range(4):
            dart = (x, slot)
            rho[dart] = (x, (slot + 1) % 4)
    for label, (e0, e1) in diagram.arcs.items():
        theta[e0] = e1
        theta[e1] = e0
    result = []
    for orbit in trace_map_faces(rho, theta):
        walk = [diagram.crossings[x][slot] for (x, slot) in orbit]
        result.append(walk)
    return result


def component_walks(
    diagram: Diagram,
) -> List[Tuple[List[int], List[Tuple[int, int]]]]:
    """Walk every link component, pairing arcs with crossing passages.

    For each component the result holds (arcs, passages) where
    passages[i] = (x, slot) is the crossing that arc arcs[i] ends at
    and the slot it enters through; the walk continues out of slot
    (slot + 2) mod 4 into arcs[(i+1) % k].  Each walk starts at the
    smallest unused arc label and leaves it through its reading-order
    second endpoint, so the output is deterministic.
    """
    comps = []
    unused = set(diagram.arcs)
    while unused:
        start = min(unused)
        arc_walk: List[int] = []
        passages: List[Tuple[int, int]] = []
        label = start
        entry = diagram.arcs[label][1]
        while True:
            arc_walk.append(label)
            unused.discard(label)
            x, slot = entry
            passages.append((x, slot))
            out_slot = (slot + 2) % 4
            label = diagram.crossings[x][out_slot]
            entry = diagram.other_end(label, (x, out_slot))
            if label == start:
                break
        comps.append((arc_walk, passages))
    return comps


def components(diagram: Diagram) -> List[List[int]]:
    """Link components as cyclic arc-label sequences."""
    return [arcs for arcs, _ in component_walks(diagram)]


def gauss_sequences(diagram: Diagram) -> List[List[Tuple[int, str]]]:
    """Per-component crossing itineraries, e.g. [(0,'U'), (2,'O'), ...].

    Each passage is tagged 'U' when the strand runs under (enters at
    slot 0 or 2) and 'O' when it runs over.
    """
    return [
        [(x, "U" if slot in (0, 2) else "O") for (x, slot) in passages]
        for _, passages in component_walks(diagram)
    ]


EXAMPLES = {
    "trefoil": "X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)",
    "hopf": "X(1,3,2,4) X(3,1,4,2)",
}
