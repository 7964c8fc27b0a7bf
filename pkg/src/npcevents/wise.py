"""Wise's six tiles, the complexes X and W, the quadrant words, and the
end-to-end driver that runs every finite check on them.

Conventions: horizontal colors x, y; vertical colors a, b, c; tip lengths
a=1, b=2, c=3, x=4, y=5. The quadrant starts at the vertex where the
y-path and the c-path leave; row m is read after climbing c^m.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from . import cover, labeling, median_events
from .complex_core import (attach_tips, barycentric_subdivision, check_admissible_orientation,
                           check_csc, check_npc, check_vh, half_name)
from .errors import LeavesBall, TranscriptionIncomplete
from .tiles import Tile, TileSet, complex_from_tiles, load_tiles

TIP_LENGTHS = {"a": 1, "b": 2, "c": 3, "x": 4, "y": 5}
BASE_VERTEX = "v"


def wise_tileset():
    return load_tiles("wise.tiles")


def build_X(tiles=None):
    return complex_from_tiles(tiles or wise_tileset(), BASE_VERTEX)


def build_W(tiles=None, r=None):
    return attach_tips(barycentric_subdivision(build_X(tiles)), r or TIP_LENGTHS)


# ---------------------------------------------------------------- quadrant words

def _transducer(tiles):
    table = {}
    for t in tiles.tiles:
        table.setdefault((t.w, t.s), t)
    return table


def _next_row(table, word, left="c"):
    """Tiles stacked on ``word`` with ``left`` as the first vertical color."""
    state = left
    cells, top, rights = [], [], []
    for letter in word:
        t = table.get((state, letter))
        if t is None:
            raise TranscriptionIncomplete(f"no tile with left={state} bottom={letter}")
        cells.append(t.name)
        top.append(t.n)
        rights.append(t.e)
        state = t.e
    return cells, "".join(top), rights


@dataclass
class QuadrantRectangle:
    width: int
    height: int
    cells: list         # cells[j][i]: tile in row j, column i
    rows: list          # rows[j] = M_width(j), j = 0..height
    columns: list       # columns[i]: vertical word on the line x = i, bottom up

    def to_dict(self):
        return {"width": self.width, "height": self.height, "cells": self.cells,
                "rows": self.rows, "columns": self.columns}


def quadrant(n, m, tiles=None):
    if n < 0 or m < 0:
        raise ValueError("quadrant sides must be nonnegative")
    table = _transducer(tiles or wise_tileset())
    word = "y" * n
    rows, cells = [word], []
    columns = [["c"] * m] + [[] for _ in range(n)]
    for _ in range(m):
        cl, word, rights = _next_row(table, word)
        cells.append(cl)
        rows.append(word)
        for i, col in enumerate(rights):
            columns[i + 1].append(col)
    return QuadrantRectangle(n, m, cells, rows, ["".join(c) for c in columns])


def row_word(n, m, tiles=None):
    table = _transducer(tiles or wise_tileset())
    word = "y" * n
    for _ in range(m):
        word = _next_row(table, word)[1]
    return word


def row_words(n, count, tiles=None):
    """M_n(0), ..., M_n(count - 1)."""
    table = _transducer(tiles or wise_tileset())
    word = "y" * n
    out = [word]
    for _ in range(count - 1):
        word = _next_row(table, word)[1]
        out.append(word)
    return out


@dataclass
class PeriodDoubling:
    ok: bool
    n_max: int
    levels: list        # (n, distinct words, status)
    collision: dict | None = None

    @property
    def status(self):
        return "PASS" if self.ok else "FAIL"

    def to_dict(self):
        return {"n_max": self.n_max, "status": self.status, "collision": self.collision,
                "levels": [{"n": n, "distinct": d, "status": s} for n, d, s in self.levels]}


def period_doubling_check(n_max, tiles=None):
    """For each n, the 2^n words M_n(m) with m < 2^n are pairwise distinct."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    # M_n(m) is the length-n prefix of M_{n_max}(m)
    words = row_words(n_max, 2 ** n_max, tiles)
    levels, collision = [], None
    for n in range(1, n_max + 1):
        seen = {}
        bad = None
        for m in range(2 ** n):
            w = words[m][:n]
            if w in seen:
                bad = {"n": n, "m1": seen[w], "m2": m, "word": w}
                break
            seen[w] = m
        levels.append((n, len(seen), "FAIL" if bad else "PASS"))
        if bad and collision is None:
            collision = bad
    return PeriodDoubling(collision is None, n_max, levels, collision)


def _with_sides(T, changes):
    new = list(T.tiles)
    for idx, side, col in changes:
        kw = {k: new[idx].side(k) for k in "nesw"}
        kw[side] = col
        new[idx] = Tile(new[idx].name, **kw)
    return TileSet(new, T.hcolors, T.vcolors, T.name)


def mutations(tiles=None, kind="side"):
    """Single-square mutations of a tile set.

    kind="side" recolors one side of one tile; kind="swap" exchanges one
    side color between two tiles. Yields (description, mutated tile set).
    """
    T = tiles or wise_tileset()
    out = []
    if kind == "side":
        for idx, t in enumerate(T.tiles):
            for side in "nesw":
                palette = T.hcolors if side in "ns" else T.vcolors
                for col in palette:
                    if col != t.side(side):
                        out.append(((t.name, side, col), _with_sides(T, [(idx, side, col)])))
    elif kind == "swap":
        for i, j in itertools.combinations(range(len(T.tiles)), 2):
            a, b = T.tiles[i], T.tiles[j]
            for side in "nesw":
                if a.side(side) != b.side(side):
                    out.append(((a.name, b.name, side),
                                _with_sides(T, [(i, side, b.side(side)), (j, side, a.side(side))])))
    else:
        raise ValueError(f"unknown mutation kind {kind!r}")
    return out


def first_failure(tiles, n_max):
    """Least n at which period doubling fails, "incomplete" when the transducer
    gets stuck, or None when it passes up to n_max."""
    try:
        pd = period_doubling_check(n_max, tiles)
    except TranscriptionIncomplete:
        return "incomplete"
    return pd.collision["n"] if pd.collision else None


# ---------------------------------------------------------------- the quadrant inside W~

def _walk(color, steps):
    return [(half_name(color, 1), 1), (half_name(color, 2), 1)] * steps


class QuadrantFragment:
    """The union of depth-``depth`` filters of the lifts of c^k, k <= m_max.

    Vertices z(k, i) are the 0-vertices of the quadrant (height k, column i);
    u(k, i) is the midpoint between z(k, i) and z(k, i + 1). Only the y-path
    and c-path are lifted by name; every other grid vertex is found from the
    squares of the subdivided cover.
    """

    def __init__(self, n, m_max, depth=None, W=None, budget=cover.DEFAULT_BUDGET):
        self.n = n
        self.m_max = m_max
        self.depth = depth if depth is not None else 2 * n + 4
        self.W = W or build_W()
        self.r_inv = {v: k for k, v in TIP_LENGTHS.items()}
        self.ball = cover.unfold_filter(self.W, BASE_VERTEX, self.depth,
                                        spine=_walk("c", m_max), budget=budget)
        self.frag = median_events.fragment_from_ball(self.ball)
        self._grid()

    # ---- navigation
    def _type(self, v):
        return self.frag.vtype.get(v)

    def _outs(self, v, t=None):
        return [w for _, w in self.frag.out[v] if t is None or self._type(w) == t]

    def _common_out(self, a, b, t):
        common = sorted(set(self._outs(a, t)) & set(self._outs(b, t)))
        if len(common) != 1:
            raise LeavesBall(f"no unique common out-neighbour of {a} and {b}")
        return common[0]

    def _mid_between(self, a, b):
        mids = [w for w in self._outs(a, 1) if b in self._outs(w, 0)]
        if len(mids) != 1:
            raise LeavesBall(f"no midpoint between {a} and {b}")
        return mids[0]

    def _grid(self):
        n, M = self.n, self.m_max
        ball = self.ball
        z = {}
        for k in range(M + 1):
            z[(k, 0)] = cover.lift_path(ball, _walk("c", k))[-1]
        for i in range(n + 1):
            z[(0, i)] = cover.lift_path(ball, _walk("y", i))[-1]
        for k in range(1, M + 1):
            for i in range(1, n + 1):
                a = z[(k - 1, i - 1)]
                h = self._mid_between(a, z[(k - 1, i)])
                v = self._mid_between(a, z[(k, i - 1)])
                w = self._common_out(h, v, 2)
                top, right = sorted(self._outs(w, 1))
                z[(k, i)] = self._common_out(top, right, 0)
        self._z = z

    def z(self, k, i):
        return self._z[(k, i)]

    def u(self, k, i):
        return self._mid_between(self._z[(k, i)], self._z[(k, i + 1)])

    def edge(self, a, b):
        for e, w in self.frag.out[a]:
            if w == b:
                return e
        raise LeavesBall(f"no edge {a} -> {b}")

    def tip_length(self, k, i):
        return self._tip_at(self.u(k, i))

    def _tip_at(self, x):
        length = 0
        while True:
            nxt = self._outs(x, 3)
            if not nxt:
                return length
            x = nxt[0]
            length += 1

    def word_from_tips(self, k, n=None):
        n = self.n if n is None else n
        return "".join(self.r_inv[self.tip_length(k, i)] for i in range(n))

    def stub(self, k, i, color):
        """The edge from z(k, i) to the horizontal midpoint of the given color."""
        want = TIP_LENGTHS[color]
        for e, w in self.frag.out[self.z(k, i)]:
            if self._type(w) == 1 and self._tip_at(w) == want:
                return e
        raise LeavesBall(f"no {color}-midpoint leaves {self.z(k, i)}")

    def covering_depth(self, i):
        """Filter depth that reaches the tip hanging at column i."""
        return 2 * i + 1 + max(TIP_LENGTHS.values())


def lift_tiling(T, tiling, ball):
    """Carry a rectangular patch into a cover ball of X(T).

    The bottom row and left column are lifted from the basepoint; every other
    grid vertex is the far corner of the lifted tile square. Returns the
    (width + 1) x (height + 1) vertex grid, or None if the patch does not
    close up inside the ball or the grid is not an isometric directed flat.
    """
    index = {t.name: k for k, t in enumerate(T.tiles)}
    g = tiling.grid
    w, h = tiling.width, tiling.height
    try:
        bottom = cover.lift_path(ball, [(T.tiles[index[g[0][i]]].s, 1) for i in range(w)])
        left = cover.lift_path(ball, [(T.tiles[index[g[j][0]]].w, 1) for j in range(h)])
    except LeavesBall:
        return None
    pos = {(i, 0): x for i, x in enumerate(bottom)}
    pos.update({(0, j): x for j, x in enumerate(left)})
    far = {(k, cs[0]): cs for _, k, cs, _ in ball.squares}
    for j in range(h):
        for i in range(w):
            cs = far.get((index[g[j][i]], pos[(i, j)]))
            if cs is None:
                return None
            # corners run SW, SE, NE, NW
            for key, x in (((i + 1, j), cs[1]), ((i + 1, j + 1), cs[2]), ((i, j + 1), cs[3])):
                if pos.setdefault(key, x) != x:
                    return None
    frag = median_events.fragment_from_ball(ball)
    conf = frag.config
    items = sorted(pos.items())
    if len({x for _, x in items}) != len(items):
        return None
    for (p, x), (q, y) in itertools.combinations(items, 2):
        if bin(conf[x] ^ conf[y]).count("1") != abs(p[0] - q[0]) + abs(p[1] - q[1]):
            return None
        if p[0] <= q[0] and p[1] <= q[1] and frag.depth[y] - frag.depth[x] != (q[0] - p[0]) + (q[1] - p[1]):
            return None
    return pos


# ---------------------------------------------------------------- driver

def degree_profile(ball):
    """Out-degrees of interior vertices, grouped by vertex type."""
    prof = {}
    for v in ball.vertices:
        if ball.interior[v]:
            prof.setdefault(ball.vtype(v), set()).add(len(ball.out(v)))
    return {t: sorted(s) for t, s in sorted(prof.items())}


def base_out_degrees(W):
    prof = {}
    for v in W.vertices:
        d = sum(1 for end in W.ends[v] if end[1] == "s")
        prof.setdefault(W.types.get(v), set()).add(d)
    return {t: sorted(s) for t, s in sorted(prof.items())}


@dataclass
class DriveReport:
    data: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.data.get("ok", False)


def counterexample_drive(radius=7, depth=2, k_max=5, n=3, labeling_limit=2,
                         n_max=12, config_bound=6, budget=cover.DEFAULT_BUDGET, log=None):
    """Run every finite check on W and collect a report.

    Fragments: (1)-(3) use the directed filter of a 0-vertex truncated at
    ``radius``; (5) uses the quadrant fragment for words of length ``n``.
    At most ``labeling_limit`` nice labelings are examined per alphabet size.
    """
    say = log or (lambda *_: None)
    t0 = time.time()
    X, W = build_X(), build_W()
    rep = {"complex_counts": {"X": list(X.counts()), "W": list(W.counts())}}
    rep["checks"] = {"npc": check_npc(X).status, "vh": check_vh(X).status,
                     "csc": check_csc(X).status, "orientation": check_admissible_orientation(X).status,
                     "W_npc": check_npc(W).status, "W_orientation": check_admissible_orientation(W).status}

    fball = cover.unfold_filter(W, BASE_VERTEX, radius, budget=budget)
    census = cover.filter_type_census(fball, depth)
    rep["census"] = {"depth": depth, "classes": census.count, "eligible": census.eligible,
                     "bound": len(W.vertices), "ok": census.count <= len(W.vertices)}
    say(f"census: {census.count} classes")

    prof = degree_profile(fball)
    rep["degree_profile"] = {
        "zero_vertex": prof.get(0), "one_vertex": prof.get(1),
        "two_vertex": prof.get(2), "three_vertex": prof.get(3),
        "base": base_out_degrees(W),
    }

    frag = median_events.fragment_from_ball(fball)
    ef = median_events.events_from_filter(frag, s=config_bound)
    q, _ = median_events.natural_clique_max(ef)
    q_pruned, _ = median_events.natural_clique_max(ef, prune_tips=True)
    rep["natural_clique_max"] = q
    rep["natural"] = {"events": ef.n, "resolved_pairs": int(ef.resolved.sum() - ef.n) // 2,
                      "pruned": q_pruned, "config_bound": config_bound, "bound": 11}
    say(f"natural clique: {q}")

    pd = period_doubling_check(n_max)
    rep["period_doubling"] = {"n_max": n_max, "status": pd.status}

    m_max = 2 ** n - 1
    quad = QuadrantFragment(n, m_max, W=W, budget=budget)
    dp_words = row_words(n, m_max + 1)
    tip_words = [quad.word_from_tips(k) for k in range(m_max + 1)]
    rep["quadrant"] = {"n": n, "m_max": m_max, "counts": list(quad.frag.counts()),
                       "classes": len(quad.frag.event_names),
                       "words_match_dp": tip_words == dp_words}
    labelings, obstructions = [], []
    lab_id = 0
    for k in range(1, k_max + 1):
        found = list(labeling.iter_nice(quad.frag, k, limit=labeling_limit))
        labelings.append({"k": k, "count": len(found), "limit": labeling_limit,
                          "capped": len(found) >= labeling_limit})
        say(f"k={k}: {len(found)} labelings")
        for lam in found:
            for m2 in range(1, m_max + 1):
                for k2 in range(m2):
                    w = labeling.regular_obstruction_witness(quad, lam, k2, m2, n)
                    d = quad.covering_depth(w.index)
                    iso = labeling.labeled_filter_iso(quad.frag, lam, quad.z(k2, 0), quad.z(m2, 0), d)
                    obstructions.append({"labeling_id": lab_id, "k": k2, "m": m2, "n": n,
                                         "alphabet": k, "index": w.index, "vertex": w.vertex,
                                         "edges": list(w.edges), "words": list(w.words),
                                         "iso_depth": d, "iso": "NONE" if iso is None else "FOUND"})
            lab_id += 1
    # without labels the same filters match: the obstruction comes from the labeling
    control = []
    for m2 in range(1, m_max + 1):
        for k2 in range(m2):
            d = quad.covering_depth(n - 1)
            iso = labeling.labeled_filter_iso(quad.frag, None, quad.z(k2, 0), quad.z(m2, 0), d)
            control.append({"k": k2, "m": m2, "depth": d, "iso": "NONE" if iso is None else "FOUND"})
    rep["colored_control"] = control
    rep["labelings"] = labelings
    rep["obstructions"] = obstructions
    rep["obstruction"] = {
        "witness_count": len(obstructions),
        "all_none": all(o["iso"] == "NONE" for o in obstructions),
    }
    p = rep["degree_profile"]
    rep["ok"] = bool(
        census.count <= len(W.vertices) and p["zero_vertex"] == [5] and p["two_vertex"] == [2]
        and set(p["one_vertex"] or []) <= {4, 5} and set(p["three_vertex"] or []) <= {0, 1}
        and q <= 11 and pd.ok and rep["quadrant"]["words_match_dp"]
        and rep["obstruction"]["all_none"]
        and all(c["iso"] == "FOUND" for c in control))
    rep["seconds"] = round(time.time() - t0, 2)
    return DriveReport(rep)
