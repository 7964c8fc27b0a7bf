"""Finite square complexes, their universal covers, the event structures read
off directed median graphs, and the finite checks around Wise's complex."""

from .complex_core import (SquareComplex, Verdict, attach_tips, barycentric_subdivision, bundled,
                           check_admissible_orientation, check_csc, check_npc, check_vh,
                           load_complex, parse_complex)
from .cover import CoverBall, unfold_ball, unfold_csc_product, unfold_filter
from .errors import NpcError
from .labeling import EdgeLabeling, check_nice, check_trace, search_nice
from .median_events import DomainFragment, events_from_filter, fragment_from_ball
from .special import check_special, detect_pathologies
from .tiles import load_tiles, tile_patch, tile_torus
from .wise import build_W, build_X, counterexample_drive, period_doubling_check

__version__ = "0.1.0"

__all__ = [
    "CoverBall", "DomainFragment", "EdgeLabeling", "NpcError", "SquareComplex", "Verdict",
    "attach_tips", "barycentric_subdivision", "build_W", "build_X", "bundled",
    "check_admissible_orientation", "check_csc", "check_nice", "check_npc", "check_special",
    "check_trace", "check_vh", "counterexample_drive", "detect_pathologies", "events_from_filter",
    "fragment_from_ball", "load_complex", "load_tiles", "parse_complex", "period_doubling_check",
    "search_nice", "tile_patch", "tile_torus", "unfold_ball", "unfold_csc_product", "unfold_filter",
]
