"""Serialization and the command line.

The JSON document is canonical: keys sorted, floats printed with %.17g
(which round-trips doubles exactly), no whitespace variance, and a
trailing newline.  Re-exporting a parsed document reproduces it byte
for byte, which makes necklace files diffable and hashable.

Exit codes of the CLI: 0 success, 1 verification failure, 2 bad input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Dict, List, Sequence, Tuple

from . import __version__
from .diagram import components, faces, gauss_sequences, parse_pd
from .errors import (
    DiagramError,
    NecklaceError,
    NumericalError,
    UnsupportedFormat,
)
from .inversive import encode, product
from .necklace import (
    ROLE_BRIDGE,
    Necklace,
    NecklaceBall,
    assemble,
    thread_polygon,
    verify,
)
from .patchwork import build_patchwork


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in document")
    return format(float(x), ".17g")


def _canonical(obj) -> str:
    if isinstance(obj, dict):
        items = sorted(obj.items())
        inner = ",".join(f"{json.dumps(k)}:{_canonical(v)}" for k, v in items)
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonical(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def to_document(necklace: Necklace) -> dict:
    balls = []
    for b in necklace.balls:
        x, y, z = b.center
        balls.append(
            {
                "id": b.ident,
                "r": b.radius,
                "role": b.role,
                "source": b.source,
                "x": x,
                "y": y,
                "z": z,
            }
        )
    return {
        "balls": balls,
        "metadata": {
            "boundary_radius": necklace.boundary_radius,
            "eps": necklace.eps,
            "pd": necklace.diagram.serialize(),
            "tool": f"necklacepack {__version__}",
        },
        "threads": [list(t) for t in necklace.threads],
    }


def dumps_json(necklace: Necklace) -> str:
    return _canonical(to_document(necklace)) + "\n"


def parse_document(text: str) -> Necklace:
    doc = json.loads(text)
    diagram = parse_pd(doc["metadata"]["pd"])
    balls = []
    for row in sorted(doc["balls"], key=lambda r: r["id"]):
        coords = encode((row["x"], row["y"], row["z"]), row["r"])
        balls.append(
            NecklaceBall(
                ident=row["id"], role=row["role"], source=row["source"], coords=coords
            )
        )
    return Necklace(
        diagram=diagram,
        balls=tuple(balls),
        threads=tuple(tuple(t) for t in doc["threads"]),
        eps=float(doc["metadata"]["eps"]),
        boundary_radius=float(doc["metadata"]["boundary_radius"]),
    )


# ---------------------------------------------------------------------------
# flat formats


def dumps_csv(necklace: Necklace) -> str:
    lines = ["id,x,y,z,r,role"]
    for b in necklace.balls:
        x, y, z = b.center
        lines.append(
            f"{b.ident},{_fmt(x)},{_fmt(y)},{_fmt(z)},{_fmt(b.radius)},{b.role}"
        )
    return "\n".join(lines) + "\n"


def dumps_obj(necklace: Necklace, segments: int = 24, rings: int = 12) -> str:
    """Wavefront OBJ: one UV-sphere object per ball plus thread polylines."""
    out = [f"# necklacepack {__version__}", f"# {len(necklace.balls)} balls"]
    base = 0
    for b in necklace.balls:
        cx, cy, cz = b.center
        r = b.radius
        out.append(f"o ball_{b.ident}")
        verts = [(cx, cy, cz + r)]
        for j in range(1, rings):
            phi = math.pi * j / rings
            for i in range(segments):
                th = 2.0 * math.pi * i / segments
                verts.append(
                    (
                        cx + r * math.sin(phi) * math.cos(th),
                        cy + r * math.sin(phi) * math.sin(th),
                        cz + r * math.cos(phi),
                    )
                )
        verts.append((cx, cy, cz - r))
        for vx, vy, vz in verts:
            out.append(f"v {_fmt(vx)} {_fmt(vy)} {_fmt(vz)}")

        def ring_vertex(j: int, i: int) -> int:
            return base + 2 + (j - 1) * segments + (i % segments)

        top, bottom = base + 1, base + 1 + (rings - 1) * segments + 1
        for i in range(segments):
            out.append(f"f {top} {ring_vertex(1, i)} {ring_vertex(1, i + 1)}")
        for j in range(1, rings - 1):
            for i in range(segments):
                a, b2 = ring_vertex(j, i), ring_vertex(j, i + 1)
                c, d = ring_vertex(j + 1, i), ring_vertex(j + 1, i + 1)
                out.append(f"f {a} {c} {d} {b2}")
        for i in range(segments):
            out.append(f"f {bottom} {ring_vertex(rings - 1, i + 1)} {ring_vertex(rings - 1, i)}")
        base = bottom

    for k in range(len(necklace.threads)):
        pts = thread_polygon(necklace, k)
        out.append(f"o thread_{k}")
        start = base + 1
        for cx, cy, cz in pts:
            out.append(f"v {_fmt(cx)} {_fmt(cy)} {_fmt(cz)}")
        base += len(pts)
        loop = " ".join(str(start + i) for i in range(len(pts)))
        out.append(f"l {loop} {start}")
    return "\n".join(out) + "\n"


def dumps_svg(necklace: Necklace, width: float = 640.0) -> str:
    """The carrier packing: plane disks as circles, tangencies as lines."""
    flat = [b for b in necklace.balls if b.role != ROLE_BRIDGE]
    xs, ys, rs = [], [], []
    for b in flat:
        x, y, _ = b.center
        xs.append(x)
        ys.append(y)
        rs.append(b.radius)
    x0 = min(x - r for x, r in zip(xs, rs))
    x1 = max(x + r for x, r in zip(xs, rs))
    y0 = min(y - r for y, r in zip(ys, rs))
    y1 = max(y + r for y, r in zip(ys, rs))
    margin = 0.05 * max(x1 - x0, y1 - y0)
    vb = (x0 - margin, -(y1 + margin), (x1 - x0) + 2 * margin, (y1 - y0) + 2 * margin)
    height = width * vb[3] / vb[2]

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="{vb[0]:.6g} {vb[1]:.6g} {vb[2]:.6g} {vb[3]:.6g}">',
        f'<g stroke-width="{0.008 * vb[2]:.6g}">',
    ]
    for i in range(len(flat)):
        for j in range(i + 1, len(flat)):
            p = product(flat[i].coords, flat[j].coords)
            if abs(p + 1.0) < 1e-2:
                xi, yi, _ = flat[i].center
                xj, yj, _ = flat[j].center
                parts.append(
                    f'<line x1="{xi:.6g}" y1="{-yi:.6g}" x2="{xj:.6g}" y2="{-yj:.6g}" '
                    f'stroke="#b0b6c0"/>'
                )
    fill = {"medial": "#4878b0", "crossing": "#c34a36"}
    for b in flat:
        x, y, _ = b.center
        parts.append(
            f'<circle cx="{x:.6g}" cy="{-y:.6g}" r="{b.radius:.6g}" '
            f'fill="{fill.get(b.role, "#888")}" fill-opacity="0.35" stroke="#30343c"/>'
        )
    parts.append("</g></svg>")
    return "\n".join(parts) + "\n"


def export(necklace: Necklace, fmt: str) -> str:
    """Render a necklace in one of the supported formats."""
    table = {
        "json": dumps_json,
        "csv": dumps_csv,
        "obj": dumps_obj,
        "svg": dumps_svg,
    }
    if fmt not in table:
        raise UnsupportedFormat(f"format {fmt!r}; supported: {', '.join(sorted(table))}")
    return table[fmt](necklace)


# ---------------------------------------------------------------------------
# CLI


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_pack(args) -> int:
    diagram = parse_pd(_read_text(args.input))
    necklace = assemble(diagram, eps=args.precision, boundary_radius=args.outer_radius)
    _write_text(args.output, dumps_json(necklace))
    return 0


def _cmd_verify(args) -> int:
    necklace = parse_document(_read_text(args.input))
    report = verify(necklace, tol=args.tol)
    print(report.summary())
    return 0 if report.passed else 1


def _cmd_export(args) -> int:
    necklace = parse_document(_read_text(args.input))
    _write_text(args.output, export(necklace, args.format))
    return 0


def _cmd_info(args) -> int:
    diagram = parse_pd(_read_text(args.input))
    pw = build_patchwork(diagram)
    comps = components(diagram)
    print(f"crossings:  {diagram.n}")
    print(f"arcs:       {len(diagram.arcs)}")
    print(f"components: {len(comps)} (arc walks: {', '.join(str(c) for c in comps)})")
    print(f"faces:      {len(faces(diagram))}")
    print(f"gauss:      {gauss_sequences(diagram)}")
    print(f"patchwork:  {len(pw.vertices)} vertices, {len(pw.edges)} tangencies")
    print(f"balls:      {5 * diagram.n}")
    return 0


def _cmd_report(args) -> int:
    diagram = parse_pd(_read_text(args.input))
    necklace = assemble(diagram, eps=args.precision, boundary_radius=args.outer_radius)
    os.makedirs(args.out_dir, exist_ok=True)

    def path(name: str) -> str:
        return os.path.join(args.out_dir, name)

    _write_text(path("necklace.json"), dumps_json(necklace))
    _write_text(path("balls.csv"), dumps_csv(necklace))
    _write_text(path("necklace.obj"), dumps_obj(necklace))
    _write_text(path("packing.svg"), dumps_svg(necklace))

    from . import figures

    figures.packing_figure(necklace).savefig(path("packing.png"), dpi=160)
    figures.necklace_figure(necklace).savefig(path("necklace.png"), dpi=160)

    report = verify(necklace, tol=args.tol)
    _write_text(path("verify.txt"), report.summary() + "\n")
    print(report.summary())
    print(f"report written to {args.out_dir}")
    return 0 if report.passed else 1


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="necklacepack",
        description="Necklace representations of knots and links from PD codes.",
    )
    parser.add_argument("--version", action="version", version=f"necklacepack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_precision(p):
        p.add_argument(
            "--precision",
            type=float,
            default=1e-4,
            help="target angle-sum residual of the radius solver (default 1e-4)",
        )
        p.add_argument(
            "--outer-radius",
            type=float,
            default=1.0,
            help="radius of the outer-face disks (default 1)",
        )

    p_pack = sub.add_parser("pack", help="build a necklace from a PD file")
    p_pack.add_argument("input", help="PD file, or - for stdin")
    p_pack.add_argument("-o", "--output", default=None, help="output JSON path (default stdout)")
    add_precision(p_pack)
    p_pack.set_defaults(func=_cmd_pack)

    p_verify = sub.add_parser("verify", help="check a necklace JSON document")
    p_verify.add_argument("input", help="necklace JSON file, or - for stdin")
    p_verify.add_argument("--tol", type=float, default=1e-3, help="tangency tolerance")
    p_verify.set_defaults(func=_cmd_verify)

    p_export = sub.add_parser("export", help="convert a necklace JSON document")
    p_export.add_argument("input", help="necklace JSON file, or - for stdin")
    p_export.add_argument("--format", required=True, help="json, csv, obj, or svg")
    p_export.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p_export.set_defaults(func=_cmd_export)

    p_info = sub.add_parser("info", help="diagram statistics without packing")
    p_info.add_argument("input", help="PD file, or - for stdin")
    p_info.set_defaults(func=_cmd_info)

    p_report = sub.add_parser(
        "report", help="pack, verify, and render everything into a directory"
    )
    p_report.add_argument("input", help="PD file, or - for stdin")
    p_report.add_argument("--out-dir", required=True, help="directory for the outputs")
    p_report.add_argument("--tol", type=float, default=1e-3, help="verification tolerance")
    add_precision(p_report)
    p_report.set_defaults(func=_cmd_report)

    if os.environ.get("NECKLACE_SEED") is not None:
        print(
            "warning: NECKLACE_SEED is set but the pipeline is deterministic; ignoring it",
            file=sys.stderr,
        )

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DiagramError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, UnsupportedFormat) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3 if isinstance(exc, NumericalError) else 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: malformed input ({exc})", file=sys.stderr)
        return 2
    except NecklaceError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
