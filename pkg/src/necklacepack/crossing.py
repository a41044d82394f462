"""Per-crossing ball constructions on top of a disk packing.

Around every crossing x the packing provides five disks: the crossing
disk and the four arc disks, tangent in a wheel (the pyramid pattern).
Lifted to 3-space these leave exactly enough room for two *bridge*
balls that carry one strand over (or under) the plane while the other
strand keeps running through the crossing ball at height zero.

All coordinates here are inversive; see the inversive module.  The key
scalar is lambda, the product of an opposite pair of arc balls.  Up to
a Moebius move the five disks form a one-parameter standard family,
and lambda pins the parameter:

    lambda >= -3 : the measured pair is the closer one, kappa = (1-lambda)/2
    lambda <  -3 : the other pair is closer,            kappa = 8/(1-lambda)

with kappa in (1, 2] the standard curvature of the closer pair.  The
bridge balls are then written down in the polyspherical coordinates of
the basis (b_x, b_c, b_f, b_-c, b_z), where c marks the closer pair, f
the farther one, and b_z the upper half-space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .circlepack import DiskPacking
from .errors import (
    BadStar,
    CollinearTangencyPoints,
    DegeneratePacking,
    NumericallyDegenerate,
    RegionViolation,
    SingularBasis,
)
from .inversive import (
    InversiveCoords,
    blow_up,
    decode,
    encode,
    product,
    reflect,
    standard_transform,
    translate,
)
from .patchwork import Patchwork

# Upper half-space {z >= 0} as a 3-ball row.
B_Z = InversiveCoords([0.0, 0.0, 1.0, 0.0, 0.0])

Z_MIRROR = np.diag([1.0, 1.0, -1.0, 1.0, 1.0])


@dataclass(frozen=True)
class PyramidalSystem:
    """The five lifted balls around one crossing, plus derived data.

    balls maps the labels 'x', 1, 2, -1, -2 to 3-ball coordinates; the
    pairs (1,-1) and (2,-2) are the under and over strand respectively,
    in PD slot order (slots 0..3 map to labels 1, 2, -1, -2).  disks
    holds the same five objects before lifting.  lam is the product of
    pair (1,-1); kappa the standard curvature of the closer pair; c the
    label (1 or 2) of the closer pair; epsilon +1 when the closer pair
    is the over strand (bridges go up), -1 otherwise.  b_t is the
    lifted tangency ball and d_t its disk form.
    """

    crossing: int
    star: Tuple[int, int, int, int]
    balls: Dict[object, InversiveCoords]
    disks: Dict[object, InversiveCoords]
    lam: float
    kappa: float
    c: int
    epsilon: int
    b_t: InversiveCoords
    d_t: InversiveCoords

    @property
    def closest_slots(self) -> Tuple[int, int]:
        return (0, 2) if self.c == 1 else (1, 3)


LABEL_OF_SLOT = {0: 1, 1: 2, 2: -1, 3: -2}


def standard_curvature(lam: float) -> Tuple[float, int]:
    """Standard curvature and closer-pair tag from a measured lambda.

    Returns (kappa, c) with c = 1 when the measured pair is the closer
    one and c = 2 otherwise.  Raises DegeneratePacking outside the open
    interval (-7, -1) that genuine crossing pyramids produce.
    """
    if not (-7.0 < lam < -1.0):
        raise DegeneratePacking(f"opposite-pair product {lam!r} outside (-7, -1)")
    if lam >= -3.0:
        return (1.0 - lam) / 2.0, 1
    return 8.0 / (1.0 - lam), 2


def label_pyramid(
    patchwork: Patchwork,
    crossing: int,
    packing: DiskPacking,
    tol: float = 1e-2,
) -> PyramidalSystem:
    """Lift and label the five balls of one crossing.

    The packing's crossing disk becomes b_x and the four arc disks
    become b_1, b_2, b_-1, b_-2 in slot order.  Raises BadStar when the
    wheel tangencies are off by more than tol, and DegeneratePacking
    when the opposite-pair product leaves the pyramid range.
    """
    star = patchwork.crossing_star[crossing]
    ids = {"x": crossing, 1: star[0], 2: star[1], -1: star[2], -2: star[3]}
    disks = {
        lbl: encode(packing.centers[v], packing.radii[v]) for lbl, v in ids.items()
    }
    balls = {lbl: blow_up(d) for lbl, d in disks.items()}

    wheel = [("x", 1), ("x", 2), ("x", -1), ("x", -2), (1, 2), (2, -1), (-1, -2), (-2, 1)]
    for a, b in wheel:
        p = product(balls[a], balls[b])
        if abs(p + 1.0) > tol:
            raise BadStar(
                f"crossing {crossing}: <b_{a},b_{b}> = {p:.6f}, not tangent within {tol}"
            )

    lam = product(balls[1], balls[-1])
    kappa, c = standard_curvature(lam)
    epsilon = 1 if c == 2 else -1

    d_t = _tangency_disk(disks)
    b_t = blow_up(d_t)
    return PyramidalSystem(
        crossing=crossing,
        star=star,
        balls=balls,
        disks=disks,
        lam=lam,
        kappa=kappa,
        c=c,
        epsilon=epsilon,
        b_t=b_t,
        d_t=d_t,
    )


def _tangency_disk(disks: Dict[object, InversiveCoords]) -> InversiveCoords:
    """The hollow disk through the four wheel tangency points.

    A point where two balls touch is the light-like direction v_i +
    v_j, and a ball passes through it exactly when orthogonal to it.
    Three of the four wheel tangency points already determine the disk
    (the fourth condition is their linear combination), so the row is
    the Q-unit vector in the kernel of a 3x4 system, with the sign
    fixed by nesting the crossing disk inside.
    """
    rows = np.stack(
        [
            disks[1].v + disks[2].v,
            disks[1].v + disks[-2].v,
            disks[-1].v + disks[2].v,
        ]
    )
    q = np.ones(4)
    q[-1] = -1.0
    _, sing, vt = np.linalg.svd(rows * q)
    if sing[-1] <= 1e-6 * sing[0]:
        # Rank below 3: the three conditions are dependent and the
        # common circle is not pinned down.
        raise CollinearTangencyPoints(
            f"tangency conditions are rank-deficient (singular values {sing})"
        )
    u = vt[-1]
    nq = float(np.dot(u[:-1], u[:-1]) - u[-1] * u[-1])
    if nq <= 1e-12:
        raise CollinearTangencyPoints("common tangent circle degenerated to a line")
    u = u / math.sqrt(nq)
    d_t = InversiveCoords(u)
    p = product(d_t, disks["x"])
    if p < 0:
        d_t = InversiveCoords(-u)
        p = -p
    if p < 1.0 - 1e-6:
        raise CollinearTangencyPoints(
            f"crossing disk not nested in the tangency circle (<d_t,d_x> = {p!r})"
        )
    return d_t


def tangency_ball(system: PyramidalSystem) -> InversiveCoords:
    """The lifted common tangency ball of a pyramidal system."""
    return system.b_t


def bridge_balls(
    system: PyramidalSystem,
    is_over: bool,
    tol: float = 1e-3,
) -> Tuple[InversiveCoords, InversiveCoords]:
    """The two balls threading the closer strand across the crossing.

    In the polyspherical coordinates of B = (b_x, b_c, b_f, b_-c, b_z)
    the first bridge ball has products (-1, -1, -1, -1-2*sqrt(kappa),
    sqrt(3+2*sqrt(kappa)-kappa)) and the second swaps the roles of b_c
    and b_-c; both rows are solved back to plain coordinates via
    u = Q B^-T p.  With is_over the bridges stay in the upper half
    space; otherwise they are mirrored through the plane.  The solved
    vectors are projected onto the unit quadric: with inexact input
    tangencies the recovery is only near-normalized, and the projection
    is the documented place that absorbs it.

    Raises SingularBasis for a numerically singular basis and
    RegionViolation when a bridge escapes its half-space or the
    tangency ball region by more than 10*tol.
    """
    c = system.c
    f = 3 - c
    basis = [
        system.balls["x"],
        system.balls[c],
        system.balls[f],
        system.balls[-c],
        B_Z,
    ]
    mat = np.column_stack([b.v for b in basis])
    if abs(np.linalg.det(mat)) < 1e-9:
        raise SingularBasis(f"crossing {system.crossing}: pyramid basis is singular")

    sq = math.sqrt(system.kappa)
    lam_c3 = -1.0 - 2.0 * sq
    lam_z3 = math.sqrt(3.0 + 2.0 * sq - system.kappa)
    rows = np.array(
        [
            [-1.0, -1.0, -1.0, lam_c3, lam_z3],
            [-1.0, lam_c3, -1.0, -1.0, lam_z3],
        ]
    )
    q = np.ones(5)
    q[-1] = -1.0
    sol = np.linalg.solve(mat.T * q, rows.T).T

    out = []
    for u in sol:
        if not is_over:
            u = Z_MIRROR @ u
        nq = float(np.dot(u[:-1], u[:-1]) - u[-1] * u[-1])
        if not (0.5 < nq < 2.0):
            raise NumericallyDegenerate(
                f"crossing {system.crossing}: bridge recovery off quadric (<u,u> = {nq!r})"
            )
        out.append(InversiveCoords(u / math.sqrt(nq)))

    side = InversiveCoords([0.0, 0.0, 1.0 if is_over else -1.0, 0.0, 0.0])
    for b in out:
        for region, name in ((side, "half-space"), (system.b_t, "tangency ball")):
            p = product(region, b)
            if p < 1.0 - 10.0 * tol:
                raise RegionViolation(
                    f"crossing {system.crossing}: bridge leaves its {name} (product {p:.6f})"
                )
    return out[0], out[1]


# ---------------------------------------------------------------------------
# the standard pyramid


def standard_rows(kappa1: float) -> Dict[object, np.ndarray]:
    """Closed-form disk rows of the standard pyramid at parameter kappa1.

    The frame: the measured pair's top ball is the half-plane {y >= 1},
    the crossing ball the half-plane {y <= -1}, the measured pair's
    bottom disk is centered on the y-axis with curvature kappa1 in
    (1, 4), and the other pair are unit disks left and right, the '2'
    one on the positive side.  Included beyond the five pyramid disks:
    the common tangency circle 't' and the mirrors '1*' and '2*' whose
    reflections swap each opposite pair.
    """
    if not (1.0 < kappa1 < 4.0):
        raise DegeneratePacking(f"standard parameter {kappa1!r} outside (1, 4)")
    k = kappa1
    rk = math.sqrt(k)
    hyp = math.sqrt(k * k + 4.0)
    return {
        "x": np.array([0.0, -1.0, 1.0, 1.0]),
        1: np.array([0.0, 1.0 - k, -1.0, k - 1.0]),
        2: np.array([2.0 / rk, 0.0, 2.0 / k - 1.0, 2.0 / k]),
        -1: np.array([0.0, 1.0, 1.0, 1.0]),
        -2: np.array([-2.0 / rk, 0.0, 2.0 / k - 1.0, 2.0 / k]),
        "t": np.array([0.0, -2.0 / hyp, k / hyp, 0.0]),
        "1*": np.array([0.0, -rk / 2.0, -1.0 / rk, (k - 2.0) / (2.0 * rk)]),
        "2*": np.array([1.0, 0.0, 0.0, 0.0]),
    }


def standard_form(system: PyramidalSystem) -> Tuple[Dict[object, InversiveCoords], float]:
    """Moebius-move a pyramid into the standard frame of standard_rows.

    Returns the transformed disks (keys 'x', 1, 2, -1, -2, 't') and the
    parameter kappa1 read off the transformed pair-1 disk.  The move is
    a composition of reflections (products preserved exactly) followed
    by the frame normalization: pair-1 disk centered on the y-axis,
    pair-2 disk on the positive side.
    """
    order = [-1, "x", 1, 2, -2, "t"]
    disks = [system.d_t if lbl == "t" else system.disks[lbl] for lbl in order]
    moved = standard_transform(disks, 0, 1)
    d1 = decode(moved[2])
    if d1.kind != "solid":
        raise DegeneratePacking("pair-1 disk did not land as a solid disk")
    kappa1 = 1.0 / d1.radius
    moved = translate(moved, (-d1.center[0], 0.0))
    d2 = decode(moved[3])
    if d2.center[0] < 0:
        mirror = encode(normal=(1.0, 0.0), offset=0.0)
        moved = [reflect(b, mirror) for b in moved]
    out = {lbl: moved[k] for k, lbl in enumerate(order)}
    return out, kappa1
