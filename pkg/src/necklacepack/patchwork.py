"""The patchwork graph: tangency pattern for a diagram's disk packing.

Every crossing contributes one *crossing* vertex and every arc one
*medial* vertex.  The crossing vertex is joined to the four medial
vertices of its arcs, consecutive medials around a crossing are joined
(corner edges), and corner edges arising twice (from bigon regions)
are merged.  The result is a simple planar triangulation-like graph
whose circle packing realizes, at each crossing, the tangent 4-cycle
of arc disks with the crossing disk in the middle (the disk pattern an
X-shaped crossing needs).

Vertices carry a counterclockwise rotation system, built from the PD
slot order at crossings and, at medial vertices, from the local
geometry of two crossing ends joined by an arc.  Faces are traced from
the rotation; with the conventions here interior faces come out as
clockwise vertex walks and the unbounded face counterclockwise.

triangulate() stellates every interior face that is not already a
triangle with one apex vertex, leaving the outer face alone, which is
exactly the shape the radius solver needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from .diagram import Diagram
from .errors import InternalError

ROLE_CROSSING = "crossing"
ROLE_MEDIAL = "medial"
ROLE_APEX = "apex"


@dataclass(frozen=True)
class Patchwork:
    """Simple planar graph with rotation system and crossing bookkeeping."""

    n: int
    roles: Dict[int, str]
    rotation: Dict[int, Tuple[int, ...]]
    crossing_star: Dict[int, Tuple[int, int, int, int]]
    strand_pairs: Dict[int, Tuple[Tuple[int, int], Tuple[int, int]]]
    medial_of_arc: Dict[int, int]
    arc_of_medial: Dict[int, int]
    outer_face: Tuple[int, ...]

    @property
    def vertices(self) -> List[int]:
        return sorted(self.rotation)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        out = set()
        for u, ring in self.rotation.items():
            for v in ring:
                out.add((u, v) if u < v else (v, u))
        return sorted(out)


@dataclass(frozen=True)
class Triangulation:
    """A patchwork with all interior faces stellated to triangles.

    triangles are counterclockwise vertex triples of the interior
    faces; boundary is the outer face walk (counterclockwise).  Apex
    vertices added by stellation are listed in apexes.
    """

    base: Patchwork
    rotation: Dict[int, Tuple[int, ...]]
    triangles: Tuple[Tuple[int, int, int], ...]
    boundary: Tuple[int, ...]
    apexes: Tuple[int, ...]

    @property
    def vertices(self) -> List[int]:
        return sorted(self.rotation)


def _trace_faces(rotation: Dict[int, Tuple[int, ...]]) -> List[List[int]]:
    """Face walks of a simple graph with rotation system.

    Darts are (vertex, position) pairs; theta flips a dart to the far
    end of its edge and rho steps counterclockwise around the vertex.
    Orbits of theta(rho(.)) are faces: interior ones clockwise, the
    outer one counterclockwise.
    """
    position: Dict[Tuple[int, int], int] = {}
    for u, ring in rotation.items():
        for k, v in enumerate(ring):
            if (u, v) in position:
                raise InternalError(f"rotation at {u} repeats neighbor {v}")
            position[(u, v)] = k

    faces: List[List[int]] = []
    unused = {(u, k) for u, ring in rotation.items() for k in range(len(ring))}
    while unused:
        start = min(unused)
        walk: List[int] = []
        h = start
        while True:
            walk.append(h[0])
            unused.discard(h)
            u, k = h
            ring = rotation[u]
            v = ring[(k + 1) % len(ring)]
            h = (v, position[(v, u)])
            if h == start:
                break
        faces.append(walk)
    return faces


def _pick_outer(faces: List[List[int]], roles: Dict[int, str]) -> List[int]:
    """Outermost face: fewest crossing vertices, then longest walk, ties
    by smallest sorted id tuple.

    Putting a crossing on the unbounded face blows its wheel up to the
    boundary scale, and the bridge dip of a huge wheel sweeps across the
    small interior clusters when projected.  An all-medial outer face
    keeps every crossing gadget compact, which is what lets the thread's
    projection reproduce the diagram crossing for crossing.
    """
    def score(w: List[int]):
        crossings = sum(1 for v in w if roles[v] == ROLE_CROSSING)
        return (-crossings, len(w), [-i for i in sorted(w)])

    return max(faces, key=score)


def build_patchwork(diagram: Diagram) -> Patchwork:
    """Assemble the patchwork graph of a diagram.

    Raises InternalError if simplification leaves a rotation list
    inconsistent; that indicates a bug, not bad input, since the
    diagram was already validated.
    """
    n = diagram.n
    labels = diagram.arc_labels
    medial_of = {lbl: n + k for k, lbl in enumerate(labels)}
    arc_of = {v: lbl for lbl, v in medial_of.items()}

    roles = {x: ROLE_CROSSING for x in range(n)}
    roles.update({v: ROLE_MEDIAL for v in arc_of})

    rotation: Dict[int, Tuple[int, ...]] = {}
    star: Dict[int, Tuple[int, int, int, int]] = {}
    for x, row in enumerate(diagram.crossings):
        ring = tuple(medial_of[lbl] for lbl in row)
        rotation[x] = ring
        star[x] = ring

    def corner(x: int, slot: int) -> int:
        return medial_of[diagram.crossings[x][slot % 4]]

    for lbl in labels:
        (x, i), (y, j) = diagram.arcs[lbl]
        ring = [
            y,
            corner(y, j - 1),
            corner(x, i + 1),
            x,
            corner(x, i - 1),
            corner(y, j + 1),
        ]
        # Bigon regions make the same corner disk appear from both ends
        # of the arc; the duplicates are always cyclically adjacent and
        # collapse to a single tangency.
        ring = _dedup_cyclic(ring, where=f"medial vertex of arc {lbl}")
        rotation[medial_of[lbl]] = tuple(ring)

    _check_symmetric(rotation)

    faces = _trace_faces(rotation)
    if any(len(w) < 3 for w in faces):
        raise InternalError("patchwork face of length < 3")
    v, e = len(rotation), sum(len(r) for r in rotation.values()) // 2
    if v - e + len(faces) != 2:
        raise InternalError(f"patchwork Euler characteristic {v - e + len(faces)}")

    pairs = {
        x: ((ring[0], ring[2]), (ring[1], ring[3])) for x, ring in star.items()
    }
    return Patchwork(
        n=n,
        roles=roles,
        rotation=rotation,
        crossing_star=star,
        strand_pairs=pairs,
        medial_of_arc=medial_of,
        arc_of_medial=arc_of,
        outer_face=tuple(_pick_outer(faces, roles)),
    )


def _dedup_cyclic(ring: List[int], where: str) -> List[int]:
    out: List[int] = []
    for v in ring:
        if out and out[-1] == v:
            continue
        out.append(v)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    if len(set(out)) != len(out):
        raise InternalError(f"non-adjacent duplicate neighbors at {where}: {ring}")
    return out


def _check_symmetric(rotation: Dict[int, Tuple[int, ...]]) -> None:
    for u, ring in rotation.items():
        for v in ring:
            if u not in rotation.get(v, ()):
                raise InternalError(f"edge {u}-{v} present only on one side")


def triangulate(patchwork: Patchwork) -> Triangulation:
    """Stellate interior faces so the radius solver sees only triangles.

    Each interior face with more than three sides gets one fresh apex
    vertex joined to every vertex of its walk; the apex slips into each
    boundary vertex's rotation between its two face neighbors.  The
    outer face is left untouched.  Raises InternalError if a face walk
    repeats a vertex (the stellation would not be simple).
    """
    rotation = {u: list(ring) for u, ring in patchwork.rotation.items()}
    faces = _trace_faces(patchwork.rotation)
    outer = list(patchwork.outer_face)
    outer_found = False
    triangles: List[Tuple[int, int, int]] = []
    apexes: List[int] = []
    next_id = max(rotation) + 1

    for walk in faces:
        if not outer_found and _same_cycle(walk, outer):
            outer_found = True
            continue
        if len(set(walk)) != len(walk):
            raise InternalError(f"face walk repeats a vertex: {walk}")
        if len(walk) == 3:
            # Traced clockwise; store counterclockwise.
            triangles.append((walk[2], walk[1], walk[0]))
            continue
        apex = next_id
        next_id += 1
        apexes.append(apex)
        rotation[apex] = list(reversed(walk))
        k = len(walk)
        for t in range(k):
            u, v = walk[t], walk[(t + 1) % k]
            # In a clockwise face walk the edge v->w leaving v is the
            # counterclockwise successor of v->u, so the apex lands
            # between them: ... u, apex, w ...
            pos = rotation[v].index(u)
            rotation[v].insert(pos + 1, apex)
            triangles.append((v, u, apex))
    if not outer_found:
        raise InternalError("outer face not among traced faces")

    tri = Triangulation(
        base=patchwork,
        rotation={u: tuple(ring) for u, ring in rotation.items()},
        triangles=tuple(triangles),
        boundary=tuple(outer),
        apexes=tuple(apexes),
    )
    _check_triangulated(tri)
    return tri


def _same_cycle(a: List[int], b: List[int]) -> bool:
    if len(a) != len(b):
        return False
    if sorted(a) != sorted(b):
        return False
    doubled = a + a
    return any(doubled[k : k + len(b)] == b for k in range(len(a))) or any(
        doubled[k : k + len(b)] == b[::-1] for k in range(len(a))
    )


def _check_triangulated(tri: Triangulation) -> None:
    faces = _trace_faces(tri.rotation)
    outer_seen = 0
    for walk in faces:
        if _same_cycle(walk, list(tri.boundary)):
            outer_seen += 1
            continue
        if len(walk) != 3:
            raise InternalError(f"non-triangle interior face survived: {walk}")
    if outer_seen != 1:
        raise InternalError("outer face lost during stellation")
    v = len(tri.rotation)
    e = sum(len(r) for r in tri.rotation.values()) // 2
    if v - e + len(faces) != 2:
        raise InternalError("stellation broke planarity")
