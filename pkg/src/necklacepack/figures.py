"""Matplotlib renderings of packings and necklaces.

Both entry points return a Figure so callers decide where it goes; the
report CLI path saves them as PNGs next to the delimited outputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .inversive import product
from .necklace import ROLE_BRIDGE, Necklace, thread_polygon

_COLORS = {"medial": "#4878b0", "crossing": "#c34a36", "bridge": "#3d9970"}


def packing_figure(necklace: Necklace):
    """The carrier disk packing with tangency lines and ball ids."""
    flat = [b for b in necklace.balls if b.role != ROLE_BRIDGE]
    fig, ax = plt.subplots(figsize=(7, 7))
    for i in range(len(flat)):
        for j in range(i + 1, len(flat)):
            if abs(product(flat[i].coords, flat[j].coords) + 1.0) < 1e-2:
                xi, yi, _ = flat[i].center
                xj, yj, _ = flat[j].center
                ax.plot([xi, xj], [yi, yj], color="0.8", lw=0.8, zorder=1)
    for b in flat:
        x, y, _ = b.center
        ax.add_patch(
            plt.Circle(
                (x, y),
                b.radius,
                facecolor=_COLORS[b.role],
                alpha=0.35,
                edgecolor="0.2",
                lw=0.8,
                zorder=2,
            )
        )
        if b.radius > 0.04:
            ax.annotate(
                str(b.ident), (x, y), ha="center", va="center", fontsize=7, zorder=3
            )
    ax.set_aspect("equal")
    ax.autoscale_view()
    ax.margins(0.05)
    ax.set_title(f"carrier packing ({len(flat)} disks)")
    fig.tight_layout()
    return fig


def necklace_figure(necklace: Necklace):
    """All 5n balls in 3-space with the thread polygons."""
    fig = plt.figure(figsize=(8, 7))
    ax = fig.add_subplot(projection="3d")

    u = np.linspace(0, 2 * np.pi, 18)
    v = np.linspace(0, np.pi, 10)
    su, sv = np.outer(np.cos(u), np.sin(v)), np.outer(np.sin(u), np.sin(v))
    sw = np.outer(np.ones_like(u), np.cos(v))
    for b in necklace.balls:
        x, y, z = b.center
        r = b.radius
        ax.plot_surface(
            x + r * su,
            y + r * sv,
            z + r * sw,
            color=_COLORS[b.role],
            alpha=0.25 if b.role != ROLE_BRIDGE else 0.6,
            linewidth=0,
            shade=True,
        )
    for k in range(len(necklace.threads)):
        pts = thread_polygon(necklace, k)
        pts = np.vstack([pts, pts[:1]])
        ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], lw=1.6, color=f"C{k}", zorder=10)

    pts = np.array([b.center for b in necklace.balls])
    radius = max(b.radius for b in necklace.balls)
    lo = pts.min(axis=0) - radius
    hi = pts.max(axis=0) + radius
    mid = (lo + hi) / 2
    half = (hi - lo).max() / 2
    ax.set_xlim(mid[0] - half, mid[0] + half)
    ax.set_ylim(mid[1] - half, mid[1] + half)
    ax.set_zlim(mid[2] - half, mid[2] + half)
    ax.set_title(f"necklace of {len(necklace.balls)} balls")
    fig.tight_layout()
    return fig
