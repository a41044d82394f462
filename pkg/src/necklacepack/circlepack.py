"""Tangent disk packings of triangulated patchworks.

Radii come from the classical boundary-value iteration: boundary disks
are pinned to a prescribed radius, and each interior disk is repeatedly
resized so that its petals wrap around it with angle sum exactly 2*pi.
The resizing uses the uniform-neighbor trick: the current angle sum is
converted to the radius a uniform flower with the same number of petals
would need, which converges markedly faster than naive scaling and is
deterministic (plain sweeps in vertex order, no randomization).

Positions then follow by breadth-first propagation over the interior
triangles: two tangent disks pin each other's boundary point, and a
third tangent disk is placed by the law of cosines on the known side.
The packing is anchored by putting the first outer-face disk at the
origin and the second centered on the positive x-axis; handedness is
pinned afterwards so that crossing stars wind counterclockwise in PD
slot order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import InternalError, LayoutInconsistent, NoConvergence
from .patchwork import Patchwork, Triangulation, triangulate

MAX_SWEEPS = 100_000


@dataclass(frozen=True)
class DiskPacking:
    """Tangent disks realizing a patchwork, one per vertex."""

    patchwork: Patchwork
    centers: Dict[int, Tuple[float, float]]
    radii: Dict[int, float]
    residual: float

    def disk(self, v: int) -> Tuple[Tuple[float, float], float]:
        return self.centers[v], self.radii[v]


def _flower_angle(r: float, ri: float, rj: float) -> float:
    """Angle at the center of disk r in the tangent triple (r, ri, rj)."""
    a, b, c = r + ri, r + rj, ri + rj
    cosv = (a * a + b * b - c * c) / (2.0 * a * b)
    return math.acos(max(-1.0, min(1.0, cosv)))


def _angle_sum(rotation, radii, v) -> float:
    ring = rotation[v]
    k = len(ring)
    rv = radii[v]
    return sum(
        _flower_angle(rv, radii[ring[t]], radii[ring[(t + 1) % k]]) for t in range(k)
    )


def solve_radii(
    triangulation: Triangulation,
    boundary_radius: float = 1.0,
    eps: float = 1e-4,
) -> Dict[int, float]:
    """Radii making every interior angle sum 2*pi within eps.

    Boundary (outer-face) disks are fixed at boundary_radius; interior
    disks, including stellation apexes, are adjusted by sweeps in
    ascending vertex order until the worst angle-sum residual drops to
    eps.  Raises NoConvergence if the sweep budget runs out or radii
    degenerate.
    """
    rotation = triangulation.rotation
    boundary = set(triangulation.boundary)
    interior = [v for v in sorted(rotation) if v not in boundary]
    radii = {v: float(boundary_radius) for v in rotation}
    if not interior:
        return radii

    two_pi = 2.0 * math.pi
    for _ in range(MAX_SWEEPS):
        worst = 0.0
        for v in interior:
            worst = max(worst, abs(_angle_sum(rotation, radii, v) - two_pi))
        if worst <= eps:
            return radii
        for v in interior:
            theta = _angle_sum(rotation, radii, v)
            k = len(rotation[v])
            s = math.sin(theta / (2.0 * k))
            if s >= 1.0:
                raise NoConvergence(f"flower at {v} degenerated (angle {theta})")
            rhat = radii[v] * s / (1.0 - s)
            sigma = math.sin(math.pi / k)
            rnew = rhat * (1.0 - sigma) / sigma
            if not (math.isfinite(rnew) and rnew > 0.0):
                raise NoConvergence(f"radius at {v} degenerated to {rnew!r}")
            radii[v] = rnew
    raise NoConvergence(f"residual {worst:.3e} after {MAX_SWEEPS} sweeps (target {eps:.1e})")


def layout(
    triangulation: Triangulation,
    radii: Dict[int, float],
    tol: float = 1e-3,
) -> Dict[int, Tuple[float, float]]:
    """Centers for solved radii, anchored on the first outer-face edge.

    The first two boundary disks sit at the origin and on the positive
    x-axis; every further disk is placed from an already-placed tangent
    pair across their shared interior triangle.  When propagation
    reaches a disk twice, the two candidate positions must agree within
    tol (scaled by the anchor edge length), else LayoutInconsistent is
    raised.  Handedness is normalized so crossing stars wind
    counterclockwise in PD order.
    """
    b = triangulation.boundary
    left_third: Dict[Tuple[int, int], int] = {}
    for (p, q, r) in triangulation.triangles:
        left_third[(p, q)] = r
        left_third[(q, r)] = p
        left_third[(r, p)] = q

    pos: Dict[int, Tuple[float, float]] = {}
    pos[b[0]] = (0.0, 0.0)
    pos[b[1]] = (radii[b[0]] + radii[b[1]], 0.0)
    tol_abs = tol * (radii[b[0]] + radii[b[1]])

    from collections import deque

    queue = deque([(b[0], b[1]), (b[1], b[0])])
    seen = {(b[0], b[1]), (b[1], b[0])}
    while queue:
        u, v = queue.popleft()
        w = left_third.get((u, v))
        if w is None:
            continue
        alpha = _flower_angle(radii[u], radii[v], radii[w])
        ux, uy = pos[u]
        vx, vy = pos[v]
        base = math.atan2(vy - uy, vx - ux)
        d = radii[u] + radii[w]
        cand = (ux + d * math.cos(base + alpha), uy + d * math.sin(base + alpha))
        if w in pos:
            err = math.hypot(pos[w][0] - cand[0], pos[w][1] - cand[1])
            if err > tol_abs:
                raise LayoutInconsistent(f"disk {w} re-placed {err:.3e} away (tol {tol_abs:.3e})")
        else:
            pos[w] = cand
        for edge in ((u, w), (w, v), (w, u), (v, w)):
            if edge not in seen:
                seen.add(edge)
                queue.append(edge)
    missing = set(triangulation.rotation) - set(pos)
    if missing:
        raise InternalError(f"layout never reached vertices {sorted(missing)}")

    pos = _pin_handedness(triangulation.base, pos)
    return pos


def _pin_handedness(patchwork, pos):
    """Reflect the layout if crossing stars wind clockwise.

    Both mirror images are tangency-wise valid; the PD convention says
    the four arc disks surround their crossing counterclockwise in slot
    order, and that is what every downstream over/under decision leans
    on.  A reflection across the x-axis keeps the anchor edge in place.
    """
    if patchwork is None or not patchwork.crossing_star:
        return pos
    x = min(patchwork.crossing_star)
    cx, cy = pos[x]
    angles = [
        math.atan2(pos[m][1] - cy, pos[m][0] - cx) for m in patchwork.crossing_star[x]
    ]
    descents = sum(
        1 for t in range(4) if angles[(t + 1) % 4] < angles[t]
    )
    if descents > 1:
        return {v: (p[0], -p[1]) for v, p in pos.items()}
    return pos


def _polish(
    tri: Triangulation,
    radii: Dict[int, float],
    pos: Dict[int, Tuple[float, float]],
    boundary_radius: float,
) -> Tuple[Dict[int, Tuple[float, float]], Dict[int, float]]:
    """Gauss-Newton refinement of the laid-out packing.

    The angle-sum sweeps and the breadth-first layout both leave errors
    of the order of the sweep threshold, and those errors get amplified
    downstream.  A few Newton steps on the edge tangency system
    |c_u - c_v| - (r_u + r_v) = 0 push the packing to machine precision.
    The two anchor centers and all boundary radii stay fixed, which pins
    the similarity gauge; the packing is rigid beyond that.
    """
    verts = sorted(tri.rotation)
    vi = {v: i for i, v in enumerate(verts)}
    boundary = set(tri.boundary)
    anchored = {tri.boundary[0], tri.boundary[1]}
    edges = sorted(
        {
            tuple(sorted((t[i], t[(i + 1) % 3])))
            for t in tri.triangles
            for i in range(3)
        }
    )
    E = np.array([(vi[u], vi[v]) for u, v in edges])

    C = np.array([pos[v] for v in verts], dtype=float)
    R = np.array([radii[v] for v in verts], dtype=float)

    free_c = np.array([v not in anchored for v in verts])
    free_r = np.array([v not in boundary for v in verts])
    ccol = -np.ones(len(verts), dtype=int)
    ccol[free_c] = 2 * np.arange(int(free_c.sum()))
    rcol = -np.ones(len(verts), dtype=int)
    rcol[free_r] = 2 * int(free_c.sum()) + np.arange(int(free_r.sum()))
    ncols = 2 * int(free_c.sum()) + int(free_r.sum())

    def worst(Cm: np.ndarray, Rm: np.ndarray) -> float:
        diff = Cm[E[:, 0]] - Cm[E[:, 1]]
        d = np.hypot(diff[:, 0], diff[:, 1])
        return float(np.abs(d - Rm[E[:, 0]] - Rm[E[:, 1]]).max())

    best = worst(C, R)
    target = 1e-13 * boundary_radius
    rows = np.arange(len(edges))
    for _ in range(20):
        if best <= target:
            break
        diff = C[E[:, 0]] - C[E[:, 1]]
        d = np.hypot(diff[:, 0], diff[:, 1])
        f = d - R[E[:, 0]] - R[E[:, 1]]
        unit = diff / d[:, None]
        J = np.zeros((len(edges), ncols))
        for side, sgn in ((0, 1.0), (1, -1.0)):
            idx = E[:, side]
            has_c = ccol[idx] >= 0
            J[rows[has_c], ccol[idx[has_c]]] = sgn * unit[has_c, 0]
            J[rows[has_c], ccol[idx[has_c]] + 1] = sgn * unit[has_c, 1]
            has_r = rcol[idx] >= 0
            J[rows[has_r], rcol[idx[has_r]]] = -1.0
        step, *_ = np.linalg.lstsq(J, -f, rcond=None)
        dC = np.zeros_like(C)
        dC[free_c, 0] = step[ccol[free_c]]
        dC[free_c, 1] = step[ccol[free_c] + 1]
        dR = np.zeros_like(R)
        dR[free_r] = step[rcol[free_r]]
        scale, improved = 1.0, False
        for _back in range(30):
            Rt = R + scale * dR
            if (Rt > 0.0).all():
                Ct = C + scale * dC
                norm = worst(Ct, Rt)
                if norm < best:
                    C, R, best, improved = Ct, Rt, norm, True
                    break
            scale *= 0.5
        if not improved:
            break
    return (
        {v: (float(C[i, 0]), float(C[i, 1])) for i, v in enumerate(verts)},
        {v: float(R[i]) for i, v in enumerate(verts)},
    )


def pack(
    patchwork: Patchwork,
    boundary_radius: float = 1.0,
    eps: float = 1e-4,
) -> DiskPacking:
    """Full pipeline from patchwork to tangent disks.

    Stellates, solves radii to residual eps, lays out centers, polishes
    the tangency system by Gauss-Newton, drops the stellation apexes,
    and cross-checks the tangency pattern: patchwork edges must be
    tangent and non-edges strictly separated, both within 10*eps
    relative to the disks involved.
    """
    tri = triangulate(patchwork)
    radii = solve_radii(tri, boundary_radius=boundary_radius, eps=eps)
    pos = layout(tri, radii, tol=10.0 * eps)
    pos, radii = _polish(tri, radii, pos, boundary_radius)
    residual = max(
        (
            abs(_angle_sum(tri.rotation, radii, v) - 2.0 * math.pi)
            for v in tri.rotation
            if v not in set(tri.boundary)
        ),
        default=0.0,
    )
    keep = set(patchwork.rotation)
    centers = {v: pos[v] for v in sorted(keep)}
    rad = {v: radii[v] for v in sorted(keep)}

    packing = DiskPacking(
        patchwork=patchwork, centers=centers, radii=rad, residual=residual
    )
    _check_tangency_pattern(packing, 10.0 * eps)
    return packing


def _check_tangency_pattern(packing: DiskPacking, tol: float) -> None:
    pw = packing.patchwork
    edges = set(pw.edges)
    verts = pw.vertices
    for a_i in range(len(verts)):
        for b_i in range(a_i + 1, len(verts)):
            u, v = verts[a_i], verts[b_i]
            d = math.dist(packing.centers[u], packing.centers[v])
            s = packing.radii[u] + packing.radii[v]
            if (u, v) in edges:
                if abs(d - s) > tol * s:
                    raise LayoutInconsistent(
                        f"edge {u}-{v} off tangency by {abs(d - s):.3e}"
                    )
            elif d < s * (1.0 - tol):
                raise LayoutInconsistent(f"non-edge {u}-{v} overlaps by {s - d:.3e}")
