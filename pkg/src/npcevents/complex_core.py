"""Finite directed square complexes with optional colors and V/H tags.

A square is stored as its boundary walk: four ``(edge, sign)`` sides where
``sign`` is +1 when the side runs from the edge's source to its target.
Loops and multi-edges are allowed, so links are built from edge-ends
``(edge, 's')`` / ``(edge, 't')`` rather than from neighbouring vertices.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .errors import (MissingTags, NonBijectiveMap, NotSubdivided, ParseError,
                     UnknownVertex, ValidationError)

DATA_DIR = Path(__file__).resolve().parent / "data"


@dataclass(frozen=True)
class Edge:
    name: str
    src: str
    dst: str
    color: str | None = None
    vh: str | None = None


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check. Truthy iff the check passed."""

    ok: bool
    check: str
    witness: object = None
    info: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    @property
    def status(self):
        return "PASS" if self.ok else "FAIL"

    def to_dict(self):
        return {"check": self.check, "status": self.status,
                "witness": _jsonable(self.witness), "info": _jsonable(self.info)}

    def text(self):
        line = f"{self.check}: {self.status}"
        if not self.ok and self.witness is not None:
            line += f" {json.dumps(_jsonable(self.witness), sort_keys=True)}"
        return line


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_jsonable(v) for v in x), key=repr)
    return x


def side_start(side):
    e, s = side
    return (e, "s") if s > 0 else (e, "t")


def side_finish(side):
    e, s = side
    return (e, "t") if s > 0 else (e, "s")


def sign_char(s):
    return "+" if s > 0 else "-"


@dataclass(frozen=True, eq=False)
class SquareComplex:
    vertices: tuple
    edges: tuple
    squares: tuple
    types: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "squares", tuple(tuple((e, int(s)) for e, s in q) for q in self.squares))
        object.__setattr__(self, "types", dict(self.types))
        self._validate()

    def _validate(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValidationError("duplicate vertex name")
        names = set()
        for e in self.edges:
            if e.name in names:
                raise ValidationError(f"duplicate edge name {e.name}")
            names.add(e.name)
            if e.src not in vs or e.dst not in vs:
                raise ValidationError(f"edge {e.name} has a dangling endpoint")
            if e.vh not in (None, "V", "H"):
                raise ValidationError(f"edge {e.name} has bad vh tag {e.vh}")
        for v in self.types:
            if v not in vs:
                raise ValidationError(f"type given for unknown vertex {v}")
        for k, q in enumerate(self.squares):
            if len(q) != 4:
                raise ValidationError(f"square {k} does not have 4 sides")
            for e, s in q:
                if e not in names:
                    raise ValidationError(f"square {k} uses unknown edge {e}")
                if s not in (1, -1):
                    raise ValidationError(f"square {k} has bad sign")
            for i in range(4):
                if self.end_vertex(side_finish(q[i])) != self.end_vertex(side_start(q[(i + 1) % 4])):
                    raise ValidationError(f"square {k} boundary walk does not close at side {i + 1}")

    # lookups
    @cached_property
    def edge(self):
        return {e.name: e for e in self.edges}

    def end_vertex(self, end):
        e = self.edge[end[0]]
        return e.src if end[1] == "s" else e.dst

    @cached_property
    def ends(self):
        """vertex -> sorted list of incident edge-ends."""
        out = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append((e.name, "s"))
            out[e.dst].append((e.name, "t"))
        for v in out:
            out[v].sort()
        return out

    @cached_property
    def corners(self):
        """vertex -> list of (square, corner, end_in, end_out).

        Corner i sits at the start of side i; ``end_in`` is the end where side
        i-1 arrives and ``end_out`` the end where side i leaves.
        """
        out = {v: [] for v in self.vertices}
        for k, q in enumerate(self.squares):
            for i in range(4):
                a = side_finish(q[i - 1])
                b = side_start(q[i])
                out[self.end_vertex(b)].append((k, i, a, b))
        return out

    @cached_property
    def corner_index(self):
        """(end, end) unordered -> list of (square, corner)."""
        idx = defaultdict(list)
        for v, cs in self.corners.items():
            for k, i, a, b in cs:
                idx[frozenset((a, b)) if a != b else frozenset((a,))].append((k, i))
        return dict(idx)

    def vtype(self, v):
        return self.types.get(v)

    def counts(self):
        return (len(self.vertices), len(self.edges), len(self.squares))

    def colors(self):
        return sorted({e.color for e in self.edges if e.color is not None})

    def with_squares(self, squares, name=None):
        return SquareComplex(self.vertices, self.edges, squares, self.types, name or self.name)

    def stripped(self):
        """Copy with colors and V/H tags removed (types kept)."""
        edges = [Edge(e.name, e.src, e.dst) for e in self.edges]
        return SquareComplex(self.vertices, edges, self.squares, self.types, self.name)


# ---------------------------------------------------------------- parsing

def parse_complex(text):
    vertices, types, edges, squares, name = [], {}, [], [], ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        try:
            if kind == "name":
                name = " ".join(tok[1:])
            elif kind == "vertex":
                vertices.append(tok[1])
                for opt in tok[2:]:
                    k, v = opt.split("=", 1)
                    if k != "type":
                        raise ParseError(f"line {lineno}: unknown vertex option {k}")
                    types[tok[1]] = int(v)
            elif kind == "edge":
                if len(tok) < 4:
                    raise ParseError(f"line {lineno}: edge needs NAME SRC DST")
                opts = {}
                for opt in tok[4:]:
                    k, v = opt.split("=", 1)
                    if k not in ("color", "vh"):
                        raise ParseError(f"line {lineno}: unknown edge option {k}")
                    opts[k] = v
                edges.append(Edge(tok[1], tok[2], tok[3], opts.get("color"), opts.get("vh")))
            elif kind == "square":
                if len(tok) != 9:
                    raise ParseError(f"line {lineno}: square needs 4 edge/sign pairs")
                sides = []
                for j in range(4):
                    e, s = tok[1 + 2 * j], tok[2 + 2 * j]
                    if s not in ("+", "-"):
                        raise ParseError(f"line {lineno}: sign must be + or -")
                    sides.append((e, 1 if s == "+" else -1))
                squares.append(sides)
            else:
                raise ParseError(f"line {lineno}: unknown record {kind}")
        except (ValueError, IndexError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return SquareComplex(vertices, edges, squares, types, name)


def format_complex(c):
    lines = []
    if c.name:
        lines.append(f"name {c.name}")
    for v in c.vertices:
        t = c.types.get(v)
        lines.append(f"vertex {v}" + (f" type={t}" if t is not None else ""))
    for e in c.edges:
        s = f"edge {e.name} {e.src} {e.dst}"
        if e.color is not None:
            s += f" color={e.color}"
        if e.vh is not None:
            s += f" vh={e.vh}"
        lines.append(s)
    for q in c.squares:
        lines.append("square " + " ".join(f"{e} {sign_char(s)}" for e, s in q))
    return "\n".join(lines) + "\n"


def complex_to_dict(c):
    return {
        "name": c.name,
        "vertices": [{"name": v, "type": c.types.get(v)} for v in c.vertices],
        "edges": [{"name": e.name, "src": e.src, "dst": e.dst, "color": e.color, "vh": e.vh}
                  for e in c.edges],
        "squares": [[[e, sign_char(s)] for e, s in q] for q in c.squares],
    }


def complex_from_dict(d):
    try:
        vertices = [v["name"] for v in d["vertices"]]
        types = {v["name"]: v["type"] for v in d["vertices"] if v.get("type") is not None}
        edges = [Edge(e["name"], e["src"], e["dst"], e.get("color"), e.get("vh")) for e in d["edges"]]
        squares = [[(e, 1 if s == "+" else -1) for e, s in q] for q in d["squares"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad complex JSON: {exc}") from exc
    return SquareComplex(vertices, edges, squares, types, d.get("name", ""))


def resolve_path(path):
    """Return ``path`` if it exists, else the bundled data file with that basename."""
    p = Path(path)
    if p.exists():
        return p
    for q in (DATA_DIR / p.name, DATA_DIR / (p.name + ".sqc"), DATA_DIR / (p.name + ".tiles")):
        if q.exists():
            return q
    raise FileNotFoundError(path)


def load_complex(path):
    p = resolve_path(path)
    text = p.read_text()
    if p.suffix == ".json":
        try:
            return complex_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
    return parse_complex(text)


def bundled(name):
    """Load a data file shipped with the package; the ``.sqc`` suffix is optional."""
    p = DATA_DIR / name
    if not p.suffix:
        p = p.with_suffix(".sqc")
    return load_complex(p)


# ---------------------------------------------------------------- links

@dataclass(frozen=True)
class VertexLink:
    vertex: str
    nodes: tuple
    link_edges: tuple  # (end, end, square, corner)

    def adjacency(self):
        adj = {n: [] for n in self.nodes}
        for a, b, _, _ in self.link_edges:
            adj[a].append(b)
            if a != b:
                adj[b].append(a)
        return adj


def vertex_link(c, v):
    if v not in c.ends:
        raise UnknownVertex(v)
    links = tuple((a, b, k, i) for k, i, a, b in c.corners[v])
    return VertexLink(v, tuple(c.ends[v]), links)


def check_npc(c):
    """Links must be simple graphs without triangles."""
    for v in sorted(c.vertices):
        lk = vertex_link(c, v)
        seen = {}
        for a, b, k, i in lk.link_edges:
            if a == b:
                return Verdict(False, "npc", {"vertex": v, "kind": "loop", "node": a, "square": k})
            key = frozenset((a, b))
            if key in seen:
                return Verdict(False, "npc", {"vertex": v, "kind": "double", "nodes": sorted(key),
                                              "squares": [seen[key], k]})
            seen[key] = k
        adj = defaultdict(set)
        for key in seen:
            a, b = sorted(key)
            adj[a].add(b)
            adj[b].add(a)
        for key in sorted(seen, key=sorted):
            a, b = sorted(key)
            common = sorted(adj[a] & adj[b])
            if common:
                return Verdict(False, "npc", {"vertex": v, "kind": "triangle",
                                              "nodes": sorted([a, b, common[0]])})
    return Verdict(True, "npc")


def _require_tags(c):
    missing = [e.name for e in c.edges if e.vh is None]
    if missing:
        raise MissingTags(f"edges without V/H tag: {sorted(missing)}")


def check_vh(c):
    _require_tags(c)
    for k, q in enumerate(c.squares):
        tags = [c.edge[e].vh for e, _ in q]
        if any(tags[i] == tags[(i + 1) % 4] for i in range(4)):
            return Verdict(False, "vh", {"square": k, "tags": tags})
    return Verdict(True, "vh")


def check_csc(c):
    _require_tags(c)
    nonunique = []
    for v in sorted(c.vertices):
        ends = c.ends[v]
        vends = [x for x in ends if c.edge[x[0]].vh == "V"]
        hends = [x for x in ends if c.edge[x[0]].vh == "H"]
        count = defaultdict(int)
        for _, _, a, b in c.corners[v]:
            count[frozenset((a, b))] += 1
        for ve in vends:
            for he in hends:
                n = count.get(frozenset((ve, he)), 0)
                if n == 0:
                    return Verdict(False, "csc", {"vertex": v, "vertical": list(ve), "horizontal": list(he)})
                if n > 1:
                    nonunique.append([v, list(ve), list(he)])
    return Verdict(True, "csc", info={"unique": not nonunique, "nonunique": nonunique})


def check_admissible_orientation(c):
    for k, q in enumerate(c.squares):
        if q[0][1] != -q[2][1] or q[1][1] != -q[3][1]:
            return Verdict(False, "orientation", {"square": k})
    return Verdict(True, "orientation")


class ParityUnionFind:
    """Union-find where each element carries a parity relative to its root."""

    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.par = {x: 0 for x in items}

    def find(self, x):
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root, acc = x, 0
        for y in reversed(path):
            acc ^= self.par[y]
            self.par[y] = acc
            self.parent[y] = root
        return root

    def parity(self, x):
        self.find(x)
        return self.par[x]

    def union(self, a, b, rel):
        """Record parity(a) xor parity(b) == rel. Returns False on contradiction."""
        ra, rb = self.find(a), self.find(b)
        pa, pb = self.par[a] if a != ra else 0, self.par[b] if b != rb else 0
        if ra == rb:
            return (pa ^ pb) == rel
        if ra > rb:
            ra, rb, pa, pb = rb, ra, pb, pa
        self.parent[rb] = ra
        self.par[rb] = pa ^ pb ^ rel
        return True


def parallelism(c):
    """Elementary parallelism closed up, with relative directions.

    Returns (classes, flip, conflicts): ``classes`` maps edge -> class id
    (the least edge name in the class), ``flip`` maps edge -> 0/1 meaning
    same/opposite direction to the class representative, and ``conflicts``
    lists the classes where direction propagation was inconsistent.
    """
    uf = ParityUnionFind([e.name for e in c.edges])
    bad = []
    for k, q in enumerate(c.squares):
        for i in (0, 1):
            (e1, s1), (e2, s2) = q[i], q[i + 2]
            # opposite sides point the same way when traversal signs differ
            if not uf.union(e1, e2, 0 if s1 == -s2 else 1):
                bad.append((e1, k))
    groups = defaultdict(list)
    for e in c.edge:
        groups[uf.find(e)].append(e)
    classes, flip = {}, {}
    for members in groups.values():
        rep = min(members)
        p0 = uf.parity(rep)
        for e in members:
            classes[e] = rep
            flip[e] = uf.parity(e) ^ p0
    conflicts = sorted({classes[e] for e, _ in bad})
    return classes, flip, conflicts


# ---------------------------------------------------------------- derived complexes

def mid_name(e):
    return f"m:{e}"


def center_name(k):
    return f"z:{k}"


def half_name(e, j):
    return f"{e}:{j}"


def spoke_name(k, i):
    return f"z{k}:{i}"


def barycentric_subdivision(c):
    """Split every edge in two and every square in four.

    Original vertices get type 0, edge midpoints type 1, square centres
    type 2. The spoke from the midpoint of side i to the centre is parallel
    to side i+1 and is directed the way that side points.
    """
    vertices = list(c.vertices) + [mid_name(e.name) for e in c.edges] + \
        [center_name(k) for k in range(len(c.squares))]
    types = {v: 0 for v in c.vertices}
    types.update({mid_name(e.name): 1 for e in c.edges})
    types.update({center_name(k): 2 for k in range(len(c.squares))})
    edges = []
    for e in c.edges:
        m = mid_name(e.name)
        edges.append(Edge(half_name(e.name, 1), e.src, m, e.color, e.vh))
        edges.append(Edge(half_name(e.name, 2), m, e.dst, e.color, e.vh))
    spoke_out = {}
    for k, q in enumerate(c.squares):
        z = center_name(k)
        for i in range(4):
            nxt = q[(i + 1) % 4]
            m = mid_name(q[i][0])
            vh = c.edge[nxt[0]].vh
            out = nxt[1] > 0  # spoke leaves the midpoint of side i
            spoke_out[(k, i)] = out
            edges.append(Edge(spoke_name(k, i), m, z, None, vh) if out else Edge(spoke_name(k, i), z, m, None, vh))
    squares = []
    for k, q in enumerate(c.squares):
        for j in range(4):
            e_j, s_j = q[j]
            e_p, s_p = q[j - 1]
            pj = (j - 1) % 4
            walk = [
                (half_name(e_j, 1), 1) if s_j > 0 else (half_name(e_j, 2), -1),
                (spoke_name(k, j), 1 if spoke_out[(k, j)] else -1),
                (spoke_name(k, pj), -1 if spoke_out[(k, pj)] else 1),
                (half_name(e_p, 2), 1) if s_p > 0 else (half_name(e_p, 1), -1),
            ]
            squares.append(walk)
    return SquareComplex(vertices, edges, squares, types, f"beta({c.name})" if c.name else "")


def tip_vertex(e, j):
    return f"t:{e}:{j}"


def attach_tips(c, r, keep_colors=True):
    """Hang a directed path of length r[color] from every type-1 vertex."""
    ones = [v for v in c.vertices if c.types.get(v) == 1]
    if not ones:
        raise NotSubdivided("no type-1 vertices")
    inc = defaultdict(set)
    for e in c.edges:
        if e.color is not None:
            inc[e.src].add(e.color)
            inc[e.dst].add(e.color)
    colour_of = {}
    for v in ones:
        cols = inc.get(v, set())
        if len(cols) != 1:
            raise NotSubdivided(f"type-1 vertex {v} has colors {sorted(cols)}")
        colour_of[v] = next(iter(cols))
    parent_colors = set(colour_of.values())
    vals = list(r.values())
    if set(r) != parent_colors or len(set(vals)) != len(vals) or \
            set(vals) != set(range(1, len(vals) + 1)):
        raise NonBijectiveMap(f"tip lengths {r} are not a bijection onto 1..{len(parent_colors)}")
    vertices = list(c.vertices)
    types = dict(c.types)
    edges = [e if keep_colors else Edge(e.name, e.src, e.dst) for e in c.edges]
    for v in ones:
        base = v[2:] if v.startswith("m:") else v
        prev = v
        for j in range(1, r[colour_of[v]] + 1):
            t = tip_vertex(base, j)
            vertices.append(t)
            types[t] = 3
            edges.append(Edge(t, prev, t))
            prev = t
    return SquareComplex(vertices, edges, c.squares, types, c.name)


def without_square(c, k):
    sq = [q for j, q in enumerate(c.squares) if j != k]
    return c.with_squares(sq)
