"""Assembly of the 5n-ball necklace and its verifier.

A diagram with n crossings yields 3n packing balls (one per arc, one
per crossing, lifted from the disk packing into the plane z = 0) and
2n bridge balls (two per crossing, off the plane).  Each link
component becomes a *thread*: a cyclic chain of balls, consecutive
ones externally tangent, that follows the component through the
packing.  Crossing a pyramid on its closer strand uses the two bridge
balls; the farther strand runs straight through the crossing ball.

verify() re-derives every promised property from the ball coordinates
and the diagram alone; it never trusts intermediate state and never
raises, returning a report with one entry per check instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from .circlepack import pack
from .crossing import (
    PyramidalSystem,
    _tangency_disk,
    bridge_balls,
    label_pyramid,
)
from .diagram import Diagram, component_walks, gauss_sequences
from .errors import InternalError, ThreadBroken
from .inversive import InversiveCoords, blow_up, decode, encode, product
from .patchwork import build_patchwork

ROLE_MEDIAL = "medial"
ROLE_CROSSING = "crossing"
ROLE_BRIDGE = "bridge"


@dataclass(frozen=True)
class NecklaceBall:
    """One solid ball of the necklace.

    ident is the 1-based position in thread order; source records what
    the ball realizes ("arc:<label>" or "crossing:<index>").
    """

    ident: int
    role: str
    source: str
    coords: InversiveCoords

    @property
    def center(self) -> Tuple[float, float, float]:
        return decode(self.coords).center

    @property
    def radius(self) -> float:
        return decode(self.coords).radius


@dataclass(frozen=True)
class Necklace:
    """A necklace representation: balls plus the threads through them."""

    diagram: Diagram
    balls: Tuple[NecklaceBall, ...]
    threads: Tuple[Tuple[int, ...], ...]
    eps: float
    boundary_radius: float

    def ball(self, ident: int) -> NecklaceBall:
        b = self.balls[ident - 1]
        if b.ident != ident:
            raise InternalError("ball idents out of order")
        return b

    @property
    def n(self) -> int:
        return self.diagram.n


def assemble(
    diagram: Diagram,
    eps: float = 1e-4,
    boundary_radius: float = 1.0,
) -> Necklace:
    """Run the whole construction: diagram -> packed 5n-ball necklace.

    Balls are numbered in thread order, components in the order their
    smallest arc labels come, which makes the output deterministic for
    a given diagram and precision.
    """
    patchwork = build_patchwork(diagram)
    packing = pack(patchwork, boundary_radius=boundary_radius, eps=eps)
    star_tol = max(1e-7, 1e3 * eps)

    systems: Dict[int, PyramidalSystem] = {}
    bridges: Dict[int, Tuple[InversiveCoords, InversiveCoords]] = {}
    for x in range(diagram.n):
        system = label_pyramid(patchwork, x, packing, tol=star_tol)
        systems[x] = system
        bridges[x] = bridge_balls(system, is_over=system.epsilon > 0)

    records: List[NecklaceBall] = []

    def _add(role: str, source: str, coords: InversiveCoords) -> int:
        ident = len(records) + 1
        records.append(NecklaceBall(ident=ident, role=role, source=source, coords=coords))
        return ident

    threads: List[Tuple[int, ...]] = []
    used_crossing_ball = set()
    for arcs, passages in component_walks(diagram):
        thread: List[int] = []
        for arc, (x, slot) in zip(arcs, passages):
            mv = patchwork.medial_of_arc[arc]
            disk = encode(packing.centers[mv], packing.radii[mv])
            thread.append(_add(ROLE_MEDIAL, f"arc:{arc}", blow_up(disk)))

            system = systems[x]
            c_slot = 0 if system.c == 1 else 1
            b3, b3p = bridges[x]
            if slot == c_slot:
                thread.append(_add(ROLE_BRIDGE, f"crossing:{x}", b3))
                thread.append(_add(ROLE_BRIDGE, f"crossing:{x}", b3p))
            elif slot == (c_slot + 2) % 4:
                thread.append(_add(ROLE_BRIDGE, f"crossing:{x}", b3p))
                thread.append(_add(ROLE_BRIDGE, f"crossing:{x}", b3))
            else:
                if x in used_crossing_ball:
                    raise InternalError(f"crossing ball {x} threaded twice")
                used_crossing_ball.add(x)
                thread.append(_add(ROLE_CROSSING, f"crossing:{x}", system.balls["x"]))
        threads.append(tuple(thread))

    if len(records) != 5 * diagram.n:
        raise InternalError(f"{len(records)} balls assembled, expected {5 * diagram.n}")
    return Necklace(
        diagram=diagram,
        balls=tuple(records),
        threads=tuple(threads),
        eps=eps,
        boundary_radius=boundary_radius,
    )


def extract_thread(necklace: Necklace, component: int, tol: float = 1e-3) -> List[NecklaceBall]:
    """The balls of one thread, in order, re-checking every link.

    Raises ThreadBroken if any consecutive pair along the cyclic chain
    fails external tangency within tol.
    """
    ids = necklace.threads[component]
    balls = [necklace.ball(i) for i in ids]
    for k, b in enumerate(balls):
        nxt = balls[(k + 1) % len(balls)]
        p = product(b.coords, nxt.coords)
        if abs(p + 1.0) > tol:
            raise ThreadBroken(
                f"thread {component}: balls {b.ident} and {nxt.ident} have product {p:.6f}"
            )
    return balls


def thread_polygon(necklace: Necklace, component: int) -> np.ndarray:
    """Vertices of one thread's closed polygon, shape (m, 3).

    Vertex k is the tangency point of thread balls k and k+1, so the
    segment after vertex k-1 is a chord of ball k and the whole polygon
    stays inside the union of its thread's balls.
    """
    ids = necklace.threads[component]
    balls = [necklace.ball(i) for i in ids]
    pts = []
    for k, b in enumerate(balls):
        nxt = balls[(k + 1) % len(balls)]
        ca, ra = np.asarray(b.center), b.radius
        cb, rb = np.asarray(nxt.center), nxt.radius
        pts.append((rb * ca + ra * cb) / (ra + rb))
    return np.asarray(pts)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    threshold: float
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.detail} (worst {self.worst:.3e}, threshold {self.threshold:.3e})"


@dataclass(frozen=True)
class VerificationReport:
    checks: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append("verification " + ("PASSED" if self.passed else "FAILED"))
        return "\n".join(lines)


def verify(necklace: Necklace, tol: float = 1e-3) -> VerificationReport:
    """Re-derive and test every promised property of a necklace.

    Checks, in order: pairwise disjointness of all balls; tangency of
    consecutive thread balls; the per-crossing curvature and bridge
    identities; agreement of each bridge pair's side of the plane with
    the diagram's over/under data; and recovery of the diagram's Gauss
    sequences from the orthogonal projection of the threads.  Identity
    checks run at 25*tol since products enter them amplified.  Never
    raises; problems land in the report.
    """
    checks = [
        _check_disjoint(necklace, tol),
        _check_threads(necklace, tol),
        _check_identities(necklace, tol),
        _check_sides(necklace, tol),
        _check_gauss(necklace),
    ]
    return VerificationReport(checks=tuple(checks))


def _check_disjoint(necklace: Necklace, tol: float) -> CheckResult:
    worst = -math.inf
    pair = None
    balls = necklace.balls
    for a in range(len(balls)):
        for b in range(a + 1, len(balls)):
            p = product(balls[a].coords, balls[b].coords)
            if p > worst:
                worst, pair = p, (balls[a].ident, balls[b].ident)
    return CheckResult(
        name="pairwise-disjoint",
        passed=worst <= -1.0 + tol,
        worst=worst,
        threshold=-1.0 + tol,
        detail=f"max product over {len(balls) * (len(balls) - 1) // 2} pairs at {pair}",
    )


def _check_threads(necklace: Necklace, tol: float) -> CheckResult:
    worst = 0.0
    where = None
    for k, thread in enumerate(necklace.threads):
        for i, ident in enumerate(thread):
            nxt = thread[(i + 1) % len(thread)]
            p = product(necklace.ball(ident).coords, necklace.ball(nxt).coords)
            err = abs(p + 1.0)
            if err > worst:
                worst, where = err, (k, ident, nxt)
    return CheckResult(
        name="thread-tangency",
        passed=worst <= tol,
        worst=worst,
        threshold=tol,
        detail=f"max |<b,b'>+1| along threads at {where}",
    )


def _crossing_tables(necklace: Necklace):
    """Rebuild per-crossing ball groups from sources, never from caches."""
    by_arc: Dict[int, NecklaceBall] = {}
    crossing_ball: Dict[int, NecklaceBall] = {}
    bridge_pair: Dict[int, List[NecklaceBall]] = {}
    for b in necklace.balls:
        _, _, idx = b.source.partition(":")
        if b.role == ROLE_MEDIAL:
            by_arc[int(idx)] = b
        elif b.role == ROLE_CROSSING:
            crossing_ball[int(idx)] = b
        else:
            bridge_pair.setdefault(int(idx), []).append(b)
    return by_arc, crossing_ball, bridge_pair


def _classify_bridges(b: Dict, pair: List[NecklaceBall]):
    """Which strand pair carries the bridges, read off the bridges.

    The carried pair has each member tangent to exactly one bridge; the
    far pair has one member tangent to both bridges and one tangent to
    neither (its products sit 2*sqrt(kappa) away from -1).  Deciding by
    tangency is stable where comparing the two pair products is not:
    when the pairs are equally close, either labeling satisfies the
    curvature identities but only one matches the built bridges.

    Returns (c, b3, b3p) where b3 is the bridge tangent to slot c.
    """
    p, q = pair

    def miss(lbl: int) -> float:
        worst = 0.0
        for m in (lbl, -lbl):
            worst = max(
                worst,
                min(
                    abs(product(p.coords, b[m]) + 1.0),
                    abs(product(q.coords, b[m]) + 1.0),
                ),
            )
        return worst

    c = 1 if miss(1) <= miss(2) else 2
    p0 = product(p.coords, b[c])
    p1 = product(q.coords, b[c])
    b3, b3p = (p, q) if abs(p0 + 1.0) <= abs(p1 + 1.0) else (q, p)
    return c, b3, b3p


def _check_identities(necklace: Necklace, tol: float) -> CheckResult:
    id_tol = 25.0 * tol
    worst = 0.0
    detail = "curvature products, bridge rows, containments at every crossing"
    passed = True
    notes = []
    by_arc, crossing_ball, bridge_pair = _crossing_tables(necklace)

    for x, row in enumerate(necklace.diagram.crossings):
        b = {
            1: by_arc[row[0]].coords,
            2: by_arc[row[1]].coords,
            -1: by_arc[row[2]].coords,
            -2: by_arc[row[3]].coords,
            "x": crossing_ball[x].coords,
        }
        lam1 = product(b[1], b[-1])
        lam2 = product(b[2], b[-2])
        worst = max(worst, abs((1.0 - lam1) * (1.0 - lam2) - 16.0) / 4.0)
        kap1 = (1.0 - lam1) / 2.0
        kap2 = (1.0 - lam2) / 2.0
        worst = max(worst, abs(kap1 * kap2 - 4.0))

        pair = bridge_pair.get(x, [])
        if len(pair) != 2:
            passed = False
            notes.append(f"crossing {x}: {len(pair)} bridge balls")
            continue
        c, b3, b3p = _classify_bridges(b, pair)
        kappa = (1.0 - (lam1 if c == 1 else lam2)) / 2.0
        if not 1.0 < kappa < 4.0:
            passed = False
            notes.append(f"crossing {x}: carried-pair curvature {kappa:.4f} outside (1, 4)")
            continue
        sq = math.sqrt(kappa)

        worst = max(worst, abs(product(b3.coords, b3p.coords) + 1.0))
        for u, v, want in (
            (b3.coords, b["x"], -1.0),
            (b3p.coords, b["x"], -1.0),
            (b3.coords, b[c], -1.0),
            (b3p.coords, b[-c], -1.0),
            (b3.coords, b[3 - c], -1.0),
            (b3p.coords, b[3 - c], -1.0),
            (b3.coords, b[-c], -1.0 - 2.0 * sq),
            (b3p.coords, b[c], -1.0 - 2.0 * sq),
        ):
            worst = max(worst, abs(product(u, v) - want))

        disks = {lbl: _flatten(vec) for lbl, vec in b.items()}
        try:
            b_t = blow_up(_tangency_disk(disks))
        except Exception as exc:  # noqa: BLE001 - verifier reports, never raises
            passed = False
            notes.append(f"crossing {x}: tangency ball failed ({exc})")
            continue
        want_t = (2.0 + 2.0 * sq - kappa) / math.sqrt(4.0 + kappa * kappa)
        for u in (b3.coords, b3p.coords):
            worst = max(worst, abs(product(b_t, u) - want_t))
            if product(b_t, u) < 1.0 - id_tol:
                passed = False
                notes.append(f"crossing {x}: bridge outside tangency ball")
    if notes:
        detail = "; ".join(notes)
    return CheckResult(
        name="crossing-identities",
        passed=passed and worst <= id_tol,
        worst=worst,
        threshold=id_tol,
        detail=detail,
    )


def _flatten(ball: InversiveCoords) -> InversiveCoords:
    """Drop the z-entry of a plane-symmetric 3-ball, giving its disk."""
    v = ball.v
    if abs(v[2]) > 1e-9:
        raise InternalError(f"ball is not plane-symmetric: z-entry {v[2]!r}")
    return InversiveCoords(np.concatenate([v[:2], v[3:]]))


def _check_sides(necklace: Necklace, tol: float) -> CheckResult:
    worst = math.inf
    passed = True
    notes = []
    by_arc, crossing_ball, bridge_pair = _crossing_tables(necklace)
    for x, row in enumerate(necklace.diagram.crossings):
        b = {
            1: by_arc[row[0]].coords,
            2: by_arc[row[1]].coords,
            -1: by_arc[row[2]].coords,
            -2: by_arc[row[3]].coords,
        }
        pair = bridge_pair.get(x, [])
        if len(pair) != 2:
            passed = False
            notes.append(f"crossing {x}: {len(pair)} bridge balls")
            continue
        # The bridges ride one strand pair: up when that is the over
        # pair (slots 1 and 3), down when it is the under pair.
        c, _, _ = _classify_bridges(b, pair)
        want_up = c == 2
        side = InversiveCoords([0.0, 0.0, 1.0 if want_up else -1.0, 0.0, 0.0])
        for bb in pair:
            p = product(side, bb.coords)
            worst = min(worst, p)
            if p < 1.0 - 10.0 * tol:
                passed = False
                notes.append(
                    f"crossing {x}: bridge {bb.ident} on the wrong side (product {p:.4f})"
                )
    detail = "; ".join(notes) if notes else "bridge z-sides match the diagram's over/under"
    return CheckResult(
        name="over-under-sides",
        passed=passed,
        worst=worst if worst < math.inf else 0.0,
        threshold=1.0 - 10.0 * tol,
        detail=detail,
    )


# -- Gauss round trip -------------------------------------------------------


def _check_gauss(necklace: Necklace) -> CheckResult:
    got, reason = _projected_gauss(necklace)
    if got is None:
        return CheckResult(
            name="gauss-roundtrip",
            passed=False,
            worst=math.nan,
            threshold=0.0,
            detail=f"projection inconclusive: {reason}",
        )
    want = gauss_sequences(necklace.diagram)
    ok = _match_gauss(want, got)
    return CheckResult(
        name="gauss-roundtrip",
        passed=ok,
        worst=0.0 if ok else 1.0,
        threshold=0.0,
        detail=(
            "projected threads recover the diagram's crossing sequences"
            if ok
            else f"projected sequences {got} do not match diagram {want}"
        ),
    )


def _projected_gauss(necklace: Necklace, guard: float = 1e-9, prox: float = 1e-6):
    """Crossing sequences of the orthogonal projection of the threads.

    Each thread is the closed polygon through consecutive tangency
    points, so every segment is a chord of a single ball.  Intersects
    every non-adjacent pair of projected segments.  Near-parallel or
    near-endpoint hits, or hits without clear z separation, abort with
    a reason; the verifier reports those as inconclusive rather than
    guessing.
    """
    polys = []
    for k in range(len(necklace.threads)):
        polys.append(list(thread_polygon(necklace, k)))

    segments = []
    for t, pts in enumerate(polys):
        for i in range(len(pts)):
            segments.append((t, i, pts[i], pts[(i + 1) % len(pts)]))

    events = []
    for a in range(len(segments)):
        ta, ia, a1, a2 = segments[a]
        for b in range(a + 1, len(segments)):
            tb, ib, b1, b2 = segments[b]
            if ta == tb:
                k = len(polys[ta])
                if (ia - ib) % k in (0, 1) or (ib - ia) % k in (0, 1):
                    continue
            da = a2[:2] - a1[:2]
            db = b2[:2] - b1[:2]
            denom = da[0] * db[1] - da[1] * db[0]
            scale = np.hypot(*da) * np.hypot(*db)
            if scale == 0.0:
                return None, f"zero-length segment in thread {ta}"
            if abs(denom) <= guard * scale:
                continue
            rhs = b1[:2] - a1[:2]
            s = (rhs[0] * db[1] - rhs[1] * db[0]) / denom
            t = (rhs[0] * da[1] - rhs[1] * da[0]) / denom
            if s < -prox or s > 1 + prox or t < -prox or t > 1 + prox:
                continue
            if min(s, t) < prox or max(s, t) > 1 - prox:
                return None, (
                    f"intersection too close to a polyline vertex "
                    f"(threads {ta},{tb}, segments {ia},{ib})"
                )
            za = a1[2] + s * (a2[2] - a1[2])
            zb = b1[2] + t * (b2[2] - b1[2])
            if abs(za - zb) <= 1e-9:
                return None, f"no z separation at threads {ta},{tb}"
            events.append(((ta, ia, s), (tb, ib, t), za > zb))

    n = necklace.diagram.n
    if len(events) != n:
        return None, f"{len(events)} projected crossings, expected {n}"

    passes = []  # (thread, position key, event id, 'O'/'U')
    for eid, (ka, kb, a_over) in enumerate(events):
        passes.append((ka[0], (ka[1], ka[2]), eid, "O" if a_over else "U"))
        passes.append((kb[0], (kb[1], kb[2]), eid, "U" if a_over else "O"))

    sequences: List[List[Tuple[int, str]]] = [[] for _ in polys]
    for t in range(len(polys)):
        mine = sorted((p for p in passes if p[0] == t), key=lambda p: p[1])
        sequences[t] = [(eid, ou) for (_, _, eid, ou) in mine]
    counts: Dict[int, List[str]] = {}
    for seq in sequences:
        for eid, ou in seq:
            counts.setdefault(eid, []).append(ou)
    if any(sorted(v) != ["O", "U"] for v in counts.values()):
        return None, "an event is not passed exactly once over and once under"
    return sequences, None


def _match_gauss(
    want: List[List[Tuple[int, str]]], got: List[List[Tuple[int, str]]]
) -> bool:
    """Match crossing sequences up to component order, rotation,
    direction, and a consistent crossing relabeling."""
    if sorted(len(s) for s in want) != sorted(len(s) for s in got):
        return False

    def variants(seq):
        out = []
        for s in (seq, seq[::-1]):
            for r in range(len(s)):
                out.append(s[r:] + s[:r])
        return out

    def backtrack(k, used, fwd, rev):
        if k == len(want):
            return True
        for g in range(len(got)):
            if g in used or len(got[g]) != len(want[k]):
                continue
            for cand in variants(got[g]):
                trial_f = dict(fwd)
                trial_r = dict(rev)
                ok = True
                for (wx, wou), (gx, gou) in zip(want[k], cand):
                    if wou != gou:
                        ok = False
                        break
                    if trial_f.get(wx, gx) != gx or trial_r.get(gx, wx) != wx:
                        ok = False
                        break
                    trial_f[wx] = gx
                    trial_r[gx] = wx
                if ok and backtrack(k + 1, used | {g}, trial_f, trial_r):
                    return True
        return False

    return backtrack(0, frozenset(), {}, {})
