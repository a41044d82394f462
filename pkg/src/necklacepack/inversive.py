"""Inversive coordinates for d-balls and the Lorentzian product.

A generalized d-ball (solid ball, hollow ball = closed complement of an
open ball, or half-space) is encoded as a space-like vector v in the
Lorentz space R^{d+1,1}, normalized so that <v,v> = 1 with respect to

    Q = diag(1, ..., 1, -1).

For a ball with boundary curvature kappa = ±1/r (positive solid,
negative hollow) and center c the vector is

    v = (kappa/2) * (2c, |c|^2 - 1/kappa^2 - 1, |c|^2 - 1/kappa^2 + 1),

and for a half-space {x : <n, x> >= delta} with unit inward normal n it
degenerates to v = (n, delta, delta).  The product <b, b'> = v^T Q v'
reads off the mutual position of two balls:

    <b,b'> >  1   one ball nested in the other's interior
    <b,b'> =  1   internal tangency
    <b,b'> =  0   orthogonal boundary circles
    <b,b'> = -1   external tangency
    <b,b'> < -1   disjoint, non-nested

The last coordinate minus the second-to-last recovers kappa, which is
how solid (kappa > 0), hollow (kappa < 0) and half-space (kappa = 0)
representations are told apart on decode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateRadius,
    DimensionMismatch,
    NormalizationDrift,
    NotTangent,
    NumericallyDegenerate,
    UnnormalizedNormal,
)

# Below this curvature magnitude an *explicitly requested* half-space is
# accepted; decode never reinterprets a tiny nonzero curvature.
HALF_SPACE_KAPPA = 1e-10

# Hard bound on |<v,v> - 1| accepted at construction.
NORMALIZATION_TOL = 1e-6


def q_matrix(dim: int) -> np.ndarray:
    """The Lorentz form diag(1,...,1,-1) acting on (dim+2)-vectors."""
    q = np.eye(dim + 2)
    q[-1, -1] = -1.0
    return q


def _qdot(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.dot(a[:-1], b[:-1]) - a[-1] * b[-1])


class InversiveCoords:
    """Normalized inversive coordinates of a generalized d-ball.

    The vector is stored exactly as given; construction fails if it is
    further than NORMALIZATION_TOL from the unit quadric.  Silent
    renormalization is deliberately avoided so that upstream numerical
    trouble surfaces here instead of being averaged away.
    """

    __slots__ = ("v",)

    def __init__(self, v: Iterable[float]):
        vec = np.asarray(v, dtype=float)
        if vec.ndim != 1 or vec.size < 3:
            raise DimensionMismatch(f"expected a flat (d+2)-vector, got shape {vec.shape}")
        if not np.all(np.isfinite(vec)):
            raise NumericallyDegenerate("non-finite inversive coordinates")
        norm = _qdot(vec, vec)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise NormalizationDrift(
                f"<v,v> = {norm!r} is off the unit quadric by {abs(norm - 1.0):.3e}"
            )
        self.v = vec
        self.v.flags.writeable = False

    @property
    def dim(self) -> int:
        """Ambient dimension d of the ball."""
        return self.v.size - 2

    @property
    def curvature(self) -> float:
        """Signed boundary curvature; exactly 0.0 for half-spaces."""
        return float(self.v[-1] - self.v[-2])

    @property
    def is_half_space(self) -> bool:
        return self.v[-1] == self.v[-2]

    def __repr__(self) -> str:
        entries = ", ".join(f"{x:.6g}" for x in self.v)
        return f"InversiveCoords([{entries}])"


@dataclass(frozen=True)
class BallShape:
    """Euclidean description of a generalized ball.

    For kind "solid" or "hollow", center/radius describe the boundary
    sphere.  For kind "half-space", center holds the unit normal
    pointing into the half-space and offset its boundary offset, i.e.
    the region is {x : <center, x> >= offset}.
    """

    kind: str
    center: tuple
    radius: float = 0.0
    offset: float = 0.0


def encode(
    center: Optional[Sequence[float]] = None,
    radius: Optional[float] = None,
    *,
    hollow: bool = False,
    normal: Optional[Sequence[float]] = None,
    offset: Optional[float] = None,
) -> InversiveCoords:
    """Encode a ball (center, radius) or a half-space (normal, offset).

    Exactly one of the two call shapes is allowed:

        encode(center, radius, hollow=False)   solid or hollow ball
        encode(normal=n, offset=delta)         half-space {<n,x> >= delta}

    Raises:
        DegenerateRadius: radius is not a positive finite number.
        UnnormalizedNormal: half-space normal is not unit length
            (beyond 1e-9), or its |kappa| would exceed the half-space
            threshold.
    """
    if normal is not None:
        if center is not None or radius is not None:
            raise DimensionMismatch("pass either center/radius or normal/offset, not both")
        n = np.asarray(normal, dtype=float)
        if offset is None:
            raise UnnormalizedNormal("half-space needs an offset")
        if abs(np.dot(n, n) - 1.0) > 1e-9:
            raise UnnormalizedNormal(f"normal has squared length {np.dot(n, n)!r}")
        n = n / np.sqrt(np.dot(n, n))
        return InversiveCoords(np.concatenate([n, [offset, offset]]))

    if center is None or radius is None:
        raise DimensionMismatch("ball needs both center and radius")
    c = np.asarray(center, dtype=float)
    if not (np.isfinite(radius) and radius > 0):
        raise DegenerateRadius(f"radius {radius!r}")
    kappa = (-1.0 if hollow else 1.0) / radius
    if abs(kappa) < HALF_SPACE_KAPPA:
        raise DegenerateRadius(
            f"radius {radius!r} exceeds the half-space threshold; encode it as one"
        )
    cc = float(np.dot(c, c))
    base = cc - radius * radius
    return InversiveCoords(
        (kappa / 2.0) * np.concatenate([2.0 * c, [base - 1.0, base + 1.0]])
    )


def decode(ball: InversiveCoords) -> BallShape:
    """Recover the Euclidean shape from inversive coordinates.

    Half-spaces are recognized only by an exactly zero curvature entry
    (the encoding stores the offset twice, so the difference is exact).
    A curvature below 1e-12 without half-space structure is reported as
    NumericallyDegenerate rather than guessed at.
    """
    v = ball.v
    d = ball.dim
    kappa = ball.curvature
    if kappa == 0.0:
        return BallShape(kind="half-space", center=tuple(v[:d]), offset=float((v[d] + v[d + 1]) / 2.0))
    if abs(kappa) < 1e-12:
        # Tolerate reflection round-off on genuine half-spaces: the first
        # d entries must still be a unit vector for this reading.
        if abs(np.dot(v[:d], v[:d]) - 1.0) < 1e-9:
            n = v[:d] / np.sqrt(np.dot(v[:d], v[:d]))
            return BallShape(kind="half-space", center=tuple(n), offset=float((v[d] + v[d + 1]) / 2.0))
        raise NumericallyDegenerate(
            f"curvature {kappa!r} is below 1e-12 but the row is not half-space shaped"
        )
    center = v[:d] / kappa
    return BallShape(
        kind="solid" if kappa > 0 else "hollow",
        center=tuple(center),
        radius=1.0 / abs(kappa),
    )


def product(a: InversiveCoords, b: InversiveCoords) -> float:
    """Lorentzian inner product <a, b> = v_a^T Q v_b."""
    if a.v.size != b.v.size:
        raise DimensionMismatch(f"dimensions {a.dim} and {b.dim}")
    return _qdot(a.v, b.v)


def gram(balls: Sequence[InversiveCoords]) -> np.ndarray:
    """Matrix of pairwise products of a ball collection."""
    if not balls:
        return np.zeros((0, 0))
    m = np.stack([b.v for b in balls])
    q = np.ones(m.shape[1])
    q[-1] = -1.0
    return (m * q) @ m.T


def blow_up(disk: InversiveCoords) -> InversiveCoords:
    """Lift a d-ball to the (d+1)-ball of equal center and radius.

    A zero entry is inserted as the new last spatial coordinate (the
    third position for disks in the plane), so products are preserved
    and the lifted ball is centered on the hyperplane x_{d+1} = 0.
    """
    v = disk.v
    d = disk.dim
    return InversiveCoords(np.concatenate([v[:d], [0.0], v[d:]]))


def reflect(ball: InversiveCoords, mirror: InversiveCoords) -> InversiveCoords:
    """Inversion of a ball in a mirror sphere, in Lorentzian form.

    sigma_m(u) = u - 2 <u, m> m.  This is an involution, preserves all
    products, and fixes exactly the balls orthogonal to the mirror.
    """
    if ball.v.size != mirror.v.size:
        raise DimensionMismatch(f"dimensions {ball.dim} and {mirror.dim}")
    u, m = ball.v, mirror.v
    return InversiveCoords(u - 2.0 * _qdot(u, m) * m)


# ---------------------------------------------------------------------------
# Moebius moves assembled from reflections.  Keeping everything as
# sigma_m compositions means products are preserved to machine accuracy
# by construction; there is no separate matrix path to drift apart.


def translate(balls: Sequence[InversiveCoords], shift: Sequence[float]) -> list:
    """Translate a collection of d-balls by a vector, via two plane reflections."""
    w = np.asarray(shift, dtype=float)
    length = float(np.linalg.norm(w))
    if length == 0.0:
        return list(balls)
    n = w / length
    m1 = encode(normal=n, offset=0.0)
    m2 = encode(normal=n, offset=length / 2.0)
    return [reflect(reflect(b, m1), m2) for b in balls]


def scale(balls: Sequence[InversiveCoords], factor: float) -> list:
    """Scale a collection about the origin by factor > 0, via two inversions."""
    if not (np.isfinite(factor) and factor > 0):
        raise DegenerateRadius(f"scale factor {factor!r}")
    if factor == 1.0:
        return list(balls)
    dim = balls[0].dim
    origin = np.zeros(dim)
    m1 = encode(origin, 1.0)
    m2 = encode(origin, float(np.sqrt(factor)))
    return [reflect(reflect(b, m1), m2) for b in balls]


def _wall_height(ball: InversiveCoords, side: float) -> float:
    """Boundary height along the last axis of a near-axis-aligned region.

    side is +1 when the region lies above its wall ({x_d >= a}) and -1
    when below.  Works uniformly for exact half-spaces and for the huge
    solid or hollow balls that inexact tangencies turn them into.
    """
    v = ball.v
    d = ball.dim
    kappa = ball.curvature
    if abs(kappa) < 1e-12:
        delta = float((v[d] + v[d + 1]) / 2.0)
        return delta * (1.0 if v[d - 1] > 0 else -1.0)
    return float((v[d - 1] - side) / kappa)


def _tangency_point(a: BallShape, b: BallShape) -> np.ndarray:
    """External tangency point of two tangent generalized balls."""
    if a.kind == "half-space" and b.kind != "half-space":
        a, b = b, a
    if a.kind != "half-space" and b.kind == "half-space":
        return np.asarray(a.center) + a.radius * np.asarray(b.center)
    ca, cb = np.asarray(a.center), np.asarray(b.center)
    gap = cb - ca
    dist = float(np.linalg.norm(gap))
    if dist == 0.0:
        raise NotTangent("concentric boundaries")
    # Walk from a's center to a's boundary toward (or away from) b;
    # correct for both external solid-solid contact and a solid ball
    # sitting inside a hollow one.
    sign = 1.0 if a.kind == "solid" else -1.0
    return ca + sign * a.radius * gap / dist


def standard_transform(
    balls: Sequence[InversiveCoords],
    i: int,
    j: int,
    *,
    tangency_tol: float = 1e-3,
) -> list:
    """Moebius-move a configuration so balls i and j become the slab walls.

    Balls i and j must be externally tangent.  The returned collection
    is the image under a composition of reflections taking ball i to
    the half-space {x_d >= 1} and ball j to {x_d <= -1}; every ball
    tangent to both ends up squeezed inside the slab.  Products between
    all pairs are exactly preserved (reflections are Q-isometries), so
    the move costs nothing in accuracy.

    Raises NotTangent if <b_i, b_j> is not -1 within tangency_tol.
    """
    work = list(balls)
    if i == j:
        raise NotTangent("a ball cannot be tangent to itself")
    p = product(work[i], work[j])
    if abs(p + 1.0) > tangency_tol:
        raise NotTangent(f"<b_i,b_j> = {p!r}")
    dim = work[i].dim

    shape_i = decode(work[i])
    shape_j = decode(work[j])
    if not (shape_i.kind == "half-space" and shape_j.kind == "half-space"):
        # Invert in a unit sphere centered at the tangency point; both
        # balls become half-spaces with opposite normals.
        pt = _tangency_point(shape_i, shape_j)
        mirror = encode(pt, 1.0)
        work = [reflect(b, mirror) for b in work]

    # Rotate the (now parallel) walls onto the last axis.  The raw first
    # d entries of a half-space row are its unit normal up to round-off.
    raw = work[i].v[:dim]
    n = raw / np.linalg.norm(raw)
    target = np.zeros(dim)
    target[-1] = 1.0
    diff = n - target
    if np.linalg.norm(diff) > 1e-12:
        if np.linalg.norm(n + target) < 1e-9:
            # Antipodal: rotate by pi in the plane of the last and first axes.
            e0 = np.zeros(dim)
            e0[0] = 1.0
            work = [reflect(b, encode(normal=target, offset=0.0)) for b in work]
            work = [reflect(b, encode(normal=e0, offset=0.0)) for b in work]
        else:
            h = diff / np.linalg.norm(diff)
            work = [reflect(b, encode(normal=h, offset=0.0)) for b in work]

    # Slide and scale the slab onto [-1, 1].  After the rotation i's
    # region sits above its wall and j's below, with a > b.
    a = _wall_height(work[i], +1.0)
    b = _wall_height(work[j], -1.0)
    if a <= b:
        raise NotTangent(f"walls out of order: boundaries at {a!r} and {b!r}")
    s = 2.0 / (a - b)
    t = -(a + b) / (a - b)
    work = scale(work, s)
    if t != 0.0:
        shift = np.zeros(dim)
        shift[-1] = t
        work = translate(work, shift)
    return work
