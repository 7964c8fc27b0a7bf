"""Wang tiles: parsing, corner determinism, the one-vertex complex of a tile
set, and bounded tiling searches on rectangles and tori.

Tiles are never rotated or reflected. A tile is (north, east, south, west);
north/south carry horizontal colors and east/west vertical ones.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .complex_core import Edge, SquareComplex, Verdict, resolve_path
from .errors import PaletteOverlap, ParseError

CORNERS = {"NW": ("n", "w"), "NE": ("n", "e"), "SW": ("s", "w"), "SE": ("s", "e")}


@dataclass(frozen=True)
class Tile:
    name: str
    n: str
    e: str
    s: str
    w: str

    def side(self, k):
        return getattr(self, k)


@dataclass(frozen=True)
class TileSet:
    tiles: tuple
    hcolors: tuple
    vcolors: tuple
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tiles", tuple(self.tiles))
        object.__setattr__(self, "hcolors", tuple(self.hcolors))
        object.__setattr__(self, "vcolors", tuple(self.vcolors))

    def validate(self):
        overlap = set(self.hcolors) & set(self.vcolors)
        if overlap:
            raise PaletteOverlap(f"colors in both palettes: {sorted(overlap)}")
        for t in self.tiles:
            for k in "ns":
                if t.side(k) not in self.hcolors:
                    raise PaletteOverlap(f"tile {t.name}: {k}={t.side(k)} is not a horizontal color")
            for k in "ew":
                if t.side(k) not in self.vcolors:
                    raise PaletteOverlap(f"tile {t.name}: {k}={t.side(k)} is not a vertical color")
        return self

    def to_dict(self):
        return {"name": self.name, "hcolors": list(self.hcolors), "vcolors": list(self.vcolors),
                "tiles": [{"name": t.name, "n": t.n, "e": t.e, "s": t.s, "w": t.w} for t in self.tiles]}


def parse_tiles(text, name=""):
    tiles, hc, vc = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "name" and len(parts) == 2:
            name = parts[1]
        elif head == "hcolor":
            hc.extend(parts[1:])
        elif head == "vcolor":
            vc.extend(parts[1:])
        elif head == "tile":
            if len(parts) != 6:
                raise ParseError(f"line {lineno}: tile needs a name and n= e= s= w=")
            kv = {}
            for p in parts[2:]:
                if "=" not in p:
                    raise ParseError(f"line {lineno}: expected key=value, got {p!r}")
                k, v = p.split("=", 1)
                if k not in "nesw" or len(k) != 1 or k in kv:
                    raise ParseError(f"line {lineno}: bad side {k!r}")
                kv[k] = v
            tiles.append(Tile(parts[1], kv["n"], kv["e"], kv["s"], kv["w"]))
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    names = [t.name for t in tiles]
    if len(set(names)) != len(names):
        raise ParseError("duplicate tile names")
    # palettes default to whatever the tiles use
    if not hc:
        hc = sorted({t.n for t in tiles} | {t.s for t in tiles})
    if not vc:
        vc = sorted({t.e for t in tiles} | {t.w for t in tiles})
    return TileSet(tiles, hc, vc, name)


def format_tiles(T):
    lines = []
    if T.name:
        lines.append(f"name {T.name}")
    lines.append("hcolor " + " ".join(T.hcolors))
    lines.append("vcolor " + " ".join(T.vcolors))
    for t in T.tiles:
        lines.append(f"tile {t.name} n={t.n} e={t.e} s={t.s} w={t.w}")
    return "\n".join(lines) + "\n"


def load_tiles(path):
    p = resolve_path(path)
    return parse_tiles(p.read_text(), p.stem)


def check_4way_deterministic(T):
    for corner, (k1, k2) in CORNERS.items():
        seen = {}
        for t in T.tiles:
            key = (t.side(k1), t.side(k2))
            if key in seen:
                return Verdict(False, "4way", {"corner": corner, "tiles": [seen[key], t.name],
                                                "colors": list(key)})
            seen[key] = t.name
    return Verdict(True, "4way")


def complex_from_tiles(T, vertex="v"):
    """One vertex, a loop per color, a square per tile (bottom, right, top^-1, left^-1)."""
    T.validate()
    edges = [Edge(c, vertex, vertex, c, "H") for c in T.hcolors]
    edges += [Edge(c, vertex, vertex, c, "V") for c in T.vcolors]
    squares = [((t.s, 1), (t.e, 1), (t.n, -1), (t.w, -1)) for t in T.tiles]
    return SquareComplex([vertex], edges, squares, {}, T.name or "tiles")


# ---------------------------------------------------------------- tiling search

@dataclass
class Tiling:
    width: int
    height: int
    grid: list          # grid[y][x] = tile name, y = 0 is the bottom row
    torus: bool = False

    def text(self):
        return "\n".join(" ".join(row) for row in reversed(self.grid)) + "\n"

    def to_dict(self):
        return {"width": self.width, "height": self.height, "torus": self.torus,
                "rows_bottom_up": self.grid}


def _solve(T, w, h, torus=False, boundary=None):
    """Backtracking with arc consistency; cells in row-major order from the bottom."""
    tiles = T.tiles
    nt = len(tiles)
    cells = [(x, y) for y in range(h) for x in range(w)]
    dom = {c: set(range(nt)) for c in cells}
    boundary = boundary or {}
    for side, key, sel in (("bottom", "s", lambda x, y: y == 0), ("top", "n", lambda x, y: y == h - 1),
                           ("left", "w", lambda x, y: x == 0), ("right", "e", lambda x, y: x == w - 1)):
        cols = boundary.get(side)
        if cols is None:
            continue
        for (x, y) in cells:
            if sel(x, y):
                want = cols[x] if side in ("bottom", "top") else cols[y]
                if want is not None:
                    dom[(x, y)] = {i for i in dom[(x, y)] if tiles[i].side(key) == want}
    # arcs: (a, b, side of a, side of b) meaning a.side == b.side
    arcs = []
    for (x, y) in cells:
        if x + 1 < w or (torus and w >= 1):
            r = ((x + 1) % w, y)
            arcs.append(((x, y), r, "e", "w"))
        if y + 1 < h or (torus and h >= 1):
            u = (x, (y + 1) % h)
            arcs.append(((x, y), u, "n", "s"))
    nbr = {c: [] for c in cells}
    for a, b, sa, sb in arcs:
        nbr[a].append((b, sa, sb))
        nbr[b].append((a, sb, sa))

    def revise(d, a, b, sa, sb):
        ok = {tiles[j].side(sb) for j in d[b]}
        new = {i for i in d[a] if tiles[i].side(sa) in ok}
        if new != d[a]:
            d[a] = new
            return True
        return False

    def propagate(d, queue):
        while queue:
            a = queue.pop()
            for b, sa, sb in nbr[a]:
                if revise(d, b, a, sb, sa):
                    if not d[b]:
                        return False
                    queue.append(b)
        return True

    if not propagate(dom, list(cells)) or any(not v for v in dom.values()):
        return None
    def choices(d, idx):
        c = cells[idx]
        return sorted(d[c], key=lambda i: tiles[i].name)

    # iterative DFS over cells in order
    frames = [(dom, 0, iter(choices(dom, 0)))]
    while frames:
        d, idx, it = frames[-1]
        nxt = next(it, None)
        if nxt is None:
            frames.pop()
            continue
        d2 = {c: set(v) for c, v in d.items()}
        d2[cells[idx]] = {nxt}
        if not propagate(d2, [cells[idx]]):
            continue
        j = idx + 1
        while j < len(cells) and len(d2[cells[j]]) == 1:
            j += 1
        if j == len(cells):
            grid = [[tiles[next(iter(d2[(x, y)]))].name for x in range(w)] for y in range(h)]
            return Tiling(w, h, grid, torus)
        frames.append((d2, j, iter(choices(d2, j))))
    return None


def verify_tiling(T, tiling):
    by = {t.name: t for t in T.tiles}
    w, h, g = tiling.width, tiling.height, tiling.grid
    for y in range(h):
        for x in range(w):
            t = by[g[y][x]]
            if x + 1 < w or tiling.torus:
                if t.e != by[g[y][(x + 1) % w]].w:
                    return False
            if y + 1 < h or tiling.torus:
                if t.n != by[g[(y + 1) % h][x]].s:
                    return False
    return True


def tile_patch(T, w, h, boundary=None):
    if w < 1 or h < 1:
        raise ValueError("patch sides must be positive")
    return _solve(T, w, h, False, boundary)


def tile_torus(T, a, b):
    if a < 1 or b < 1:
        raise ValueError("torus periods must be positive")
    return _solve(T, a, b, True)


@dataclass
class ProbeReport:
    largest_patch: int
    patch_failed_at: int | None
    tori: list
    tried: list
    verdict: str

    def to_dict(self):
        return {"largest_patch": self.largest_patch, "patch_failed_at": self.patch_failed_at,
                "tori": [list(p) for p in self.tori], "tried": len(self.tried), "verdict": self.verdict}


def torus_order(max_period):
    return sorted(itertools.product(range(1, max_period + 1), repeat=2),
                  key=lambda p: (p[0] * p[1], p[0], p[1]))


def aperiodicity_probe(T, max_patch, max_period):
    """Bounded evidence only: patches that tile and tori that do not."""
    largest, failed = 0, None
    for n in range(1, max_patch + 1):
        if tile_patch(T, n, n) is None:
            failed = n
            break
        largest = n
    tori, tried = [], []
    for a, b in torus_order(max_period):
        tried.append((a, b))
        if tile_torus(T, a, b) is not None:
            tori.append((a, b))
    if failed is not None:
        verdict = "does not tile (bounded certificate)"
    elif tori:
        verdict = "periodic"
    else:
        verdict = "aperiodic-consistent up to bounds"
    return ProbeReport(largest, failed, tori, tried, verdict)


def corner_roles_complete(T):
    """Every (vertical, horizontal) color pair occurs at each of the four corners."""
    for k1, k2 in CORNERS.values():
        seen = {(t.side(k2), t.side(k1)) for t in T.tiles}
        if seen != set(itertools.product(T.vcolors, T.hcolors)):
            return False
    return True


def to_json(obj):
    return json.dumps(obj, sort_keys=True)
