"""Necklace representations of knots and links.

Turns a planar diagram (PD code) with n crossings into an explicit
packing of 5n round balls in 3-space whose chains of consecutively
tangent balls form a polygonal link isotopic to the input, together
with a verifier for every property the construction promises.
"""

from .diagram import Diagram, parse_pd
from .inversive import InversiveCoords, blow_up, decode, encode, gram, product, reflect
from .necklace import Necklace, assemble, thread_polygon, verify
from .patchwork import Patchwork, build_patchwork, triangulate
from .circlepack import DiskPacking, layout, pack, solve_radii

__version__ = "0.1.0"

__all__ = [
    "Diagram",
    "parse_pd",
    "InversiveCoords",
    "encode",
    "decode",
    "product",
    "gram",
    "blow_up",
    "reflect",
    "Patchwork",
    "build_patchwork",
    "triangulate",
    "DiskPacking",
    "solve_radii",
    "layout",
    "pack",
    "Necklace",
    "assemble",
    "verify",
    "__version__",
]
