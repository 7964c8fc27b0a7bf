"""Finite pieces of universal covers of NPC square complexes.

Two builders produce a :class:`CoverBall`:

* :func:`unfold_ball` works for any NPC complex. It attaches copies of base
  stars and closes squares, folding vertices with a union-find whenever two
  lifts of a square's far corner must coincide.
* :func:`unfold_csc_product` handles one-vertex complete VH complexes, whose
  cover is a product of two trees; edge projections are pushed outward one
  square at a time.

:func:`unfold_filter` is the directed variant used for principal filters: it
only follows outgoing edge-ends and closes squares at their source corner.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from . import _iso
from .complex_core import (Edge, SquareComplex, Verdict, check_admissible_orientation,
                           check_csc, check_npc, check_vh, side_finish, side_start)
from .errors import (DepthExceedsBall, DifferentFibers, FoldConflict, LeavesBall,
                     NotCSC, NotNPC, NotOneVertex, ResourceLimit, UnknownVertex,
                     ValidationError)

DEFAULT_BUDGET = 400_000


@dataclass(eq=False)
class CoverBall:
    base: SquareComplex
    basepoint: str
    radius: int | None
    directed: bool
    vertices: list
    rho: dict
    dist: dict
    edges: dict          # name -> (src, dst, base edge)
    squares: list        # (name, base square, corners, sides)
    interior: dict
    square_complete: dict
    meta: dict = field(default_factory=dict)

    @cached_property
    def adj(self):
        """vertex -> {(base edge, 's'|'t'): (edge name, other vertex)}."""
        a = {v: {} for v in self.vertices}
        for name, (s, d, e) in self.edges.items():
            a[s][(e, "s")] = (name, d)
            a[d][(e, "t")] = (name, s)
        return a

    def out(self, u):
        return [(name, w) for (e, end), (name, w) in sorted(self.adj[u].items()) if end == "s"]

    def counts(self):
        return (len(self.vertices), len(self.edges), len(self.squares))

    def color(self, edge_name):
        return self.base.edge[self.edges[edge_name][2]].color

    def vtype(self, v):
        return self.base.types.get(self.rho[v])

    def as_complex(self):
        """The ball's cells as a SquareComplex with inherited colors, tags, types."""
        edges = []
        for name, (s, d, e) in self.edges.items():
            be = self.base.edge[e]
            edges.append(Edge(name, s, d, be.color, be.vh))
        types = {v: self.vtype(v) for v in self.vertices if self.vtype(v) is not None}
        sq = [sides for _, _, _, sides in self.squares]
        return SquareComplex(self.vertices, edges, sq, types, f"cover({self.base.name})")

    def to_dict(self):
        from .complex_core import complex_to_dict
        return {
            "base": complex_to_dict(self.base),
            "basepoint": self.basepoint,
            "radius": self.radius,
            "directed": self.directed,
            "vertices": [{"name": v, "rho": self.rho[v], "dist": self.dist[v],
                          "interior": self.interior[v], "square_complete": self.square_complete[v]}
                         for v in self.vertices],
            "edges": [{"name": n, "src": s, "dst": d, "rho": e} for n, (s, d, e) in self.edges.items()],
            "squares": [{"name": n, "rho": k, "corners": list(cs),
                         "sides": [[e, "+" if s > 0 else "-"] for e, s in sides]}
                        for n, k, cs, sides in self.squares],
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d):
        from .complex_core import complex_from_dict
        base = complex_from_dict(d["base"])
        vs = [v["name"] for v in d["vertices"]]
        return cls(base, d["basepoint"], d["radius"], d["directed"], vs,
                   {v["name"]: v["rho"] for v in d["vertices"]},
                   {v["name"]: v["dist"] for v in d["vertices"]},
                   {e["name"]: (e["src"], e["dst"], e["rho"]) for e in d["edges"]},
                   [(q["name"], q["rho"], tuple(q["corners"]),
                     tuple((e, 1 if s == "+" else -1) for e, s in q["sides"])) for q in d["squares"]],
                   {v["name"]: v["interior"] for v in d["vertices"]},
                   {v["name"]: v["square_complete"] for v in d["vertices"]},
                   d.get("meta", {}))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dot(self):
        lines = ["digraph cover {"]
        for v in self.vertices:
            t = self.vtype(v)
            lines.append(f'  "{v}" [rho="{self.rho[v]}", type="{t}", interior={str(self.interior[v]).lower()}];')
        for n, (s, d, e) in self.edges.items():
            col = self.base.edge[e].color
            lines.append(f'  "{s}" -> "{d}" [label="{e}", color_class="{col}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- naming

def _key_str(key):
    e, s = key
    return f"{e}{s}"


def _finalize(base, root, nodes, rho, arcs, squares, radius, directed, keep=None):
    """Turn an explicit graph into a canonically named CoverBall.

    ``arcs`` is a list of (src, dst, base edge); ``squares`` a list of
    (base square, corners). Vertices beyond ``keep`` (a distance cap) are
    dropped together with every cell touching them.
    """
    outs = {u: [] for u in nodes}
    ins = {u: [] for u in nodes}
    for s, d, e in arcs:
        outs[s].append((e, d))
        ins[d].append((e, s))
    # distances (directed balls only walk forward)
    dist = {root: 0}
    dq = deque([root])
    while dq:
        u = dq.popleft()
        if keep is not None and dist[u] >= keep:
            continue
        nbrs = [w for _, w in outs[u]] + ([] if directed else [w for _, w in ins[u]])
        for w in nbrs:
            if w not in dist:
                dist[w] = dist[u] + 1
                dq.append(w)
    kept = set(dist)
    # canonical names: lexicographically least shortest lift path
    path = {root: ()}
    by_level = {}
    for u, d in dist.items():
        by_level.setdefault(d, []).append(u)
    for d in sorted(by_level):
        if d == 0:
            continue
        for u in by_level[d]:
            best = None
            for e, w in ins[u]:
                if w in kept and dist[w] == d - 1:
                    cand = path[w] + ((e, "+"),)
                    if best is None or cand < best:
                        best = cand
            if not directed:
                for e, w in outs[u]:
                    if w in kept and dist[w] == d - 1:
                        cand = path[w] + ((e, "-"),)
                        if best is None or cand < best:
                            best = cand
            path[u] = best
    name = {u: "o" + "".join("/" + _key_str(k) for k in p) for u, p in path.items()}
    order = sorted(kept, key=lambda u: (dist[u], path[u]))
    vertices = [name[u] for u in order]
    edges, by_src = {}, {}
    for s, d, e in sorted(((s, d, e) for s, d, e in arcs if s in kept and d in kept),
                          key=lambda t: (name[t[0]], t[2])):
        en = f"{name[s]}>{e}"
        edges[en] = (name[s], name[d], e)
        by_src[(name[s], e)] = en
    sq_out, seen = [], set()
    for k, cs in squares:
        if not all(c in kept for c in cs):
            continue
        key = (k, cs[0])
        if key in seen:
            continue
        seen.add(key)
        cn = tuple(name[c] for c in cs)
        sides = []
        for i, (e, s) in enumerate(base.squares[k]):
            src = cn[i] if s > 0 else cn[(i + 1) % 4]
            sides.append((by_src[(src, e)], s))
        sq_out.append((f"{k}@{cn[0]}", k, cn, tuple(sides)))
    sq_out.sort(key=lambda t: t[0])
    # certificates
    ends_here = {v: 0 for v in vertices}
    for en, (s, d, e) in edges.items():
        ends_here[s] += 1
        if not directed:
            ends_here[d] += 1
    corners_here = {v: 0 for v in vertices}
    for _, k, cn, _ in sq_out:
        for i, c in enumerate(cn):
            if not directed or _is_source_corner(base, k, i):
                corners_here[c] += 1
    rho_n = {name[u]: rho[u] for u in kept}
    interior, complete = {}, {}
    for u in order:
        v, b = name[u], rho[u]
        if directed:
            need_e = sum(1 for x in base.ends[b] if x[1] == "s")
            need_c = sum(1 for (k, i, _, _) in base.corners[b] if _is_source_corner(base, k, i))
        else:
            need_e = len(base.ends[b])
            need_c = len(base.corners[b])
        interior[v] = ends_here[v] == need_e
        complete[v] = interior[v] and corners_here[v] == need_c
    return CoverBall(base, name[root], radius, directed, vertices, rho_n,
                     {name[u]: dist[u] for u in kept}, edges, sq_out, interior, complete)


def _is_source_corner(base, k, i):
    q = base.squares[k]
    return side_finish(q[i - 1])[1] == "s" and side_start(q[i])[1] == "s"


# ---------------------------------------------------------------- folding unfolder

class _Unfolder:
    def __init__(self, base, budget):
        self.base = base
        self.budget = budget
        self.parent, self.rho, self.level = [], [], []
        self.out, self.inn, self.done, self.cornered = [], [], [], []
        self.sq = []
        self.heap = []

    def new(self, bv, level):
        if len(self.parent) >= self.budget:
            raise ResourceLimit(f"unfolding exceeded {self.budget} vertices")
        i = len(self.parent)
        self.parent.append(i)
        self.rho.append(bv)
        self.level.append(level)
        self.out.append({})
        self.inn.append({})
        self.done.append(False)
        self.cornered.append(False)
        heapq.heappush(self.heap, (level, i))
        return i

    def find(self, x):
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def step(self, u, end):
        u = self.find(u)
        e, which = end
        table = self.out if which == "s" else self.inn
        t = table[u].get(e)
        if t is None:
            be = self.base.edge[e]
            w = self.new(be.dst if which == "s" else be.src, self.level[u] + 1)
            table[u][e] = w
            (self.inn if which == "s" else self.out)[w][e] = u
            return w
        t = self.find(t)
        if self.level[u] + 1 < self.level[t]:
            self.level[t] = self.level[u] + 1
            heapq.heappush(self.heap, (self.level[t], t))
        return t

    def merge(self, a, b):
        stack = [(a, b)]
        while stack:
            a, b = stack.pop()
            a, b = self.find(a), self.find(b)
            if a == b:
                continue
            if self.rho[a] != self.rho[b]:
                raise FoldConflict(f"square closing identifies lifts of {self.rho[a]} and {self.rho[b]}")
            if a > b:
                a, b = b, a
            self.parent[b] = a
            if self.level[b] < self.level[a]:
                self.level[a] = self.level[b]
                heapq.heappush(self.heap, (self.level[a], a))
            self.done[a] = self.done[a] or self.done[b]
            self.cornered[a] = self.cornered[a] or self.cornered[b]
            for table in (self.out, self.inn):
                ta, tb = table[a], table[b]
                for e, t in tb.items():
                    if e in ta:
                        stack.append((ta[e], t))
                    else:
                        ta[e] = t
                table[b] = {}

    def close(self, u, k, i):
        q = self.base.squares[k]
        u1 = self.step(u, side_start(q[i]))
        u2a = self.step(u1, side_start(q[(i + 1) % 4]))
        u3 = self.step(u, side_finish(q[i - 1]))
        u2b = self.step(u3, side_finish(q[(i - 2) % 4]))
        self.merge(u2a, u2b)
        cs = [None] * 4
        cs[i], cs[(i + 1) % 4], cs[(i + 2) % 4], cs[(i + 3) % 4] = u, u1, u2a, u3
        self.sq.append((k, cs))

    def run(self, limit, directed):
        """Lift stars at level <= limit; close corners at level <= limit - 1.

        A square inside the ball has its nearest corner at most two below
        the rim, so corners further out are never needed.
        """
        base = self.base
        while self.heap:
            lvl, u = heapq.heappop(self.heap)
            u = self.find(u)
            if self.level[u] > limit:
                continue
            b = self.rho[u]
            if not self.done[u]:
                self.done[u] = True
                for end in base.ends[b]:
                    if not directed or end[1] == "s":
                        self.step(u, end)
            u = self.find(u)
            if self.level[u] <= limit - 1 and not self.cornered[u]:
                self.cornered[u] = True
                for k, i, a, c in base.corners[b]:
                    if not directed or (a[1] == "s" and c[1] == "s"):
                        self.close(u, k, i)
                        u = self.find(u)

    def export(self):
        roots = [i for i in range(len(self.parent)) if self.find(i) == i]
        rho = {u: self.rho[u] for u in roots}
        arcs = []
        for u in roots:
            for e, t in self.out[u].items():
                arcs.append((u, self.find(t), e))
        squares = [(k, tuple(self.find(c) for c in cs)) for k, cs in self.sq]
        return roots, rho, arcs, squares


def _check_vertex(c, v):
    if v not in c.ends:
        raise UnknownVertex(v)


def unfold_ball(c, v, r, budget=DEFAULT_BUDGET, check=True):
    """Ball of radius ``r`` about a lift of ``v`` in the universal cover."""
    _check_vertex(c, v)
    if check:
        verdict = check_npc(c)
        if not verdict:
            raise NotNPC(json.dumps(verdict.witness, sort_keys=True))
    U = _Unfolder(c, budget)
    root = U.new(v, 0)
    U.run(r - 1, directed=False)
    nodes, rho, arcs, squares = U.export()
    ball = _finalize(c, U.find(root), nodes, rho, arcs, squares, r, False, keep=r)
    ball.meta["builder"] = "fold"
    return ball


def unfold_filter(c, v, depth, spine=(), budget=DEFAULT_BUDGET, check=True):
    """Principal filter of a lift of ``v`` truncated at ``depth`` directed steps.

    With a ``spine`` (a base walk of positive sides from ``v``) every vertex on
    the lifted spine is given the full ``depth`` allowance, so the result is
    the union of the truncated filters of those vertices.
    """
    _check_vertex(c, v)
    if check:
        verdict = check_npc(c)
        if not verdict:
            raise NotNPC(json.dumps(verdict.witness, sort_keys=True))
        if not check_admissible_orientation(c):
            raise ValidationError("directed unfolding needs an admissible orientation")
    U = _Unfolder(c, budget)
    root = U.new(v, 0)
    seeds = [root]
    u = root
    for e, s in spine:
        if s < 0:
            raise ValueError("spine must follow edges forward")
        u = U.step(u, (e, "s"))
        U.level[u] = 0
        heapq.heappush(U.heap, (0, u))
        seeds.append(u)
    U.run(depth - 1, directed=True)
    nodes, rho, arcs, squares = U.export()
    seeds = [U.find(s) for s in seeds]
    root = U.find(root)
    # allowance = least directed distance from any seed
    outs = {n: [] for n in nodes}
    for s, d, e in arcs:
        outs[s].append(d)
    allow = {s: 0 for s in seeds}
    dq = deque(seeds)
    while dq:
        x = dq.popleft()
        if allow[x] >= depth:
            continue
        for w in outs[x]:
            if w not in allow:
                allow[w] = allow[x] + 1
                dq.append(w)
    keep_nodes = [n for n in nodes if n in allow]
    arcs = [t for t in arcs if t[0] in allow and t[1] in allow]
    squares = [t for t in squares if all(x in allow for x in t[1])]
    ball = _finalize(c, root, keep_nodes, rho, arcs, squares, depth if not spine else None, True)
    ball.meta["builder"] = "filter"
    if spine:
        ball.meta["spine"] = [[e, "+"] for e, _ in spine]
    return ball


# ---------------------------------------------------------------- product of trees

def _tree_children(gens, p):
    last = p[-1] if p else None
    for e in gens:
        for s in (1, -1):
            if last is not None and last[0] == e and last[1] == -s:
                continue
            yield (e, s)


def _tree_ball(gens, r):
    levels = [[()]]
    for _ in range(r):
        levels.append([p + (g,) for p in levels[-1] for g in _tree_children(gens, p)])
    return levels


def product_region(c, v, hverts, vverts, check=True, l1=None):
    """Cells of the product of two rooted subtrees, with projections to ``c``.

    ``hverts``/``vverts`` are prefix-closed sets of reduced words over the
    horizontal/vertical loops. Returns (nodes, rho, arcs, squares) ready for
    :func:`_finalize`; nodes are pairs (p, q).
    """
    if len(c.vertices) != 1:
        raise NotOneVertex(f"{len(c.vertices)} vertices")
    if check:
        for verdict in (check_vh(c), check_csc(c), check_npc(c)):
            if not verdict:
                raise NotCSC(verdict.text())
    hset, vset = set(hverts), set(vverts)
    hkids, vkids = _children_index(hset), _children_index(vset)
    hb, vb = {}, {}
    for p in hset:
        if p:
            hb[(p[:-1], (), p[-1])] = p[-1][0]
    for q in vset:
        if q:
            vb[((), q[:-1], q[-1])] = q[-1][0]
    sq = []
    ok = (lambda p, q: True) if l1 is None else (lambda p, q: len(p) + len(q) <= l1)
    pairs = sorted(((p, q) for p in hset for q in vset if ok(p, q)),
                   key=lambda t: (len(t[0]) + len(t[1]), t))
    for p, q in pairs:
        if l1 is not None and len(p) + len(q) > l1 - 2:
            continue
        for g in hkids.get(p, ()):
            for k in vkids.get(q, ()):
                B = hb[(p, q, g)]
                L = vb[(p, q, k)]
                end_h = (B, "s") if g[1] > 0 else (B, "t")
                end_v = (L, "s") if k[1] > 0 else (L, "t")
                found = c.corner_index.get(frozenset((end_h, end_v)))
                if not found:
                    raise NotCSC(f"no square at corner {end_h} {end_v}")
                ks, i = found[0]
                sqr = c.squares[ks]
                hs = i if side_start(sqr[i]) == end_h else (i - 1) % 4
                vs = (i - 1) % 4 if hs == i else i
                top = sqr[(hs + 2) % 4][0]
                right = sqr[(vs + 2) % 4][0]
                for key, val, table in (((p, q + (k,), g), top, hb), ((p + (g,), q, k), right, vb)):
                    if table.get(key, val) != val:
                        raise FoldConflict(f"inconsistent projection at {key}")
                    table[key] = val
                pg, qk = p + (g,), q + (k,)
                cs = [None] * 4
                cs[i] = (p, q)
                cs[(i + 1) % 4] = (pg, q) if hs == i else (p, qk)
                cs[(i + 2) % 4] = (pg, qk)
                cs[(i + 3) % 4] = (p, qk) if hs == i else (pg, q)
                sq.append((ks, tuple(cs)))
    nodes = pairs
    rho = {n: v for n in nodes}
    arcs = []
    nodeset = set(nodes)
    for (p, q, g), e in hb.items():
        if (p + (g,), q) in nodeset and (p, q) in nodeset:
            a, b = (p, q), (p + (g,), q)
            arcs.append((a, b, e) if g[1] > 0 else (b, a, e))
    for (p, q, k), e in vb.items():
        if (p, q + (k,)) in nodeset and (p, q) in nodeset:
            a, b = (p, q), (p, q + (k,))
            arcs.append((a, b, e) if k[1] > 0 else (b, a, e))
    return nodes, rho, arcs, sq


def _children_index(tset):
    kids = {}
    for w in tset:
        if w:
            kids.setdefault(w[:-1], []).append(w[-1])
    return {p: sorted(k) for p, k in kids.items()}


def unfold_csc_product(c, v, r, check=True):
    """Ball of radius ``r`` in the product-of-trees cover of a one-vertex CSC."""
    if len(c.vertices) != 1:
        raise NotOneVertex(f"{len(c.vertices)} vertices")
    _check_vertex(c, v)
    hg = sorted(e.name for e in c.edges if e.vh == "H")
    vg = sorted(e.name for e in c.edges if e.vh == "V")
    hl = _tree_ball(hg, r)
    vl = _tree_ball(vg, r)
    # only pairs with |p| + |q| <= r survive; restrict the trees accordingly
    hverts = [p for lvl in hl for p in lvl]
    vverts = [q for lvl in vl for q in lvl]
    nodes, rho, arcs, sq = _product_l1(c, v, hverts, vverts, r, check)
    ball = _finalize(c, ((), ()), nodes, rho, arcs, sq, r, False, keep=r)
    ball.meta["builder"] = "product"
    return ball


def _product_l1(c, v, hverts, vverts, r, check):
    return product_region(c, v, hverts, vverts, check, l1=r)


def ball_signature(ball):
    """Canonical description; equal signatures mean isomorphic over the base."""
    return (tuple(sorted((v, ball.rho[v]) for v in ball.vertices)),
            tuple(sorted(ball.edges.items())),
            tuple(sorted((k, cs) for _, k, cs, _ in ball.squares)))


def isomorphism_over_base(b1, b2):
    """Basepoint-fixing map commuting with the projections, or None.

    Lifts are unique, so the map is forced: walk both balls in parallel
    along edge-ends and check every cell.
    """
    if b1.base is not b2.base and b1.base.counts() != b2.base.counts():
        return None
    f = {b1.basepoint: b2.basepoint}
    dq = deque([b1.basepoint])
    while dq:
        u = dq.popleft()
        for end, (_, w) in b1.adj[u].items():
            hit = b2.adj[f[u]].get(end)
            if hit is None:
                return None
            if w in f:
                if f[w] != hit[1]:
                    return None
            else:
                f[w] = hit[1]
                dq.append(w)
    if len(f) != len(b2.vertices) or len(set(f.values())) != len(f):
        return None
    for u in b1.vertices:
        if b1.rho[u] != b2.rho[f[u]] or len(b1.adj[u]) != len(b2.adj[f[u]]):
            return None
    s1 = {(k, tuple(f[x] for x in cs)) for _, k, cs, _ in b1.squares}
    s2 = {(k, cs) for _, k, cs, _ in b2.squares}
    if s1 != s2:
        return None
    return f


# ---------------------------------------------------------------- paths and deck maps

def parse_walk(text):
    """'y+ c+ a-' or 'y c' -> [(edge, sign)]."""
    walk = []
    for tok in text.replace(",", " ").split():
        if tok[-1] in "+-":
            walk.append((tok[:-1], 1 if tok[-1] == "+" else -1))
        else:
            walk.append((tok, 1))
    return walk


def lift_path(ball, base_path, start=None):
    if isinstance(base_path, str):
        base_path = parse_walk(base_path)
    u = ball.basepoint if start is None else start
    if u not in ball.adj:
        raise UnknownVertex(u)
    path = [u]
    for e, s in base_path:
        hit = ball.adj[u].get((e, "s" if s > 0 else "t"))
        if hit is None:
            raise LeavesBall(f"lift of {e}{'+' if s > 0 else '-'} leaves the ball at {u}")
        u = hit[1]
        path.append(u)
    return path


@dataclass
class DeckMap:
    vertices: dict
    edges: dict
    squares: dict


def deck_transport(ball, u, u2):
    """The cover automorphism sending ``u`` to ``u2``, as far as the ball allows."""
    for x in (u, u2):
        if x not in ball.adj:
            raise LeavesBall(f"{x} is not in the ball")
    if ball.rho[u] != ball.rho[u2]:
        raise DifferentFibers(f"{u} lies over {ball.rho[u]}, {u2} over {ball.rho[u2]}")
    f = {u: u2}
    dq = deque([u])
    while dq:
        x = dq.popleft()
        for end, (_, w) in ball.adj[x].items():
            hit = ball.adj[f[x]].get(end)
            if hit is None:
                continue
            if w in f:
                if f[w] != hit[1]:
                    raise FoldConflict(f"path lifting is not well defined at {w}")
            else:
                f[w] = hit[1]
                dq.append(w)
    emap = {}
    by_src = {(s, e): n for n, (s, d, e) in ball.edges.items()}
    for n, (s, d, e) in ball.edges.items():
        if s in f and d in f:
            m = by_src.get((f[s], e))
            if m is not None and ball.edges[m][1] == f[d]:
                emap[n] = m
    smap = {}
    by_corner = {(k, cs): n for n, k, cs, _ in ball.squares}
    for n, k, cs, _ in ball.squares:
        if all(x in f for x in cs):
            m = by_corner.get((k, tuple(f[x] for x in cs)))
            if m is not None:
                smap[n] = m
    return DeckMap(f, emap, smap)


# ---------------------------------------------------------------- census

@dataclass
class Census:
    depth: int
    count: int
    classes: list  # (representative, members)
    eligible: int

    def to_dict(self):
        return {"depth": self.depth, "count": self.count, "eligible": self.eligible,
                "classes": [{"representative": r, "size": len(m)} for r, m in self.classes]}


def rooted_filter(ball, u, depth, colored=True, typed=True):
    """Depth-truncated directed filter of ``u`` as a rooted graph, or None if it leaves the interior."""
    level = {u: 0}
    dq = deque([u])
    while dq:
        x = dq.popleft()
        if level[x] == depth:
            continue
        if not ball.interior[x]:
            return None
        for _, w in ball.out(x):
            if w not in level:
                level[w] = level[x] + 1
                dq.append(w)
    out = {}
    for x in level:
        lst = []
        if level[x] < depth:
            for name, w in ball.out(x):
                lst.append((ball.color(name) if colored else None, w))
        out[x] = lst
    vattr = {x: (ball.vtype(x) if typed else None) for x in level}
    return (u, vattr, out)


def filter_type_census(ball, depth, colored=True, typed=True):
    """Group vertices by the isomorphism type of their truncated filters."""
    reps = []  # (signature, rep, graph, members)
    eligible = 0
    for u in sorted(ball.vertices):
        g = rooted_filter(ball, u, depth, colored, typed)
        if g is None:
            continue
        eligible += 1
        sig = _root_signature(g)
        for entry in reps:
            if entry[0] == sig and _iso.find_isomorphism(entry[2], g) is not None:
                entry[3].append(u)
                break
        else:
            reps.append((sig, u, g, [u]))
    if eligible == 0:
        raise DepthExceedsBall(f"no vertex has its depth-{depth} filter inside the interior")
    classes = [(rep, members) for _, rep, _, members in reps]
    return Census(depth, len(classes), classes, eligible)


def _root_signature(g):
    root, vattr, out = g
    # bottom-up hash of the truncated filter, insensitive to vertex names
    memo = {}

    def h(x):
        if x in memo:
            return memo[x]
        val = hash((vattr[x], tuple(sorted((hash(a), h(w)) for a, w in out[x]))))
        memo[x] = val
        return val
    order = list(out)
    for x in reversed(order):
        h(x)
    return (len(out), sum(len(v) for v in out.values()), h(root))


def check_covering_condition(ball):
    """Every interior vertex sees each base edge-end exactly once, and each
    square-complete vertex sees each base corner exactly once."""
    base = ball.base
    corner_count = {v: {} for v in ball.vertices}
    for _, k, cs, _ in ball.squares:
        for i, x in enumerate(cs):
            corner_count[x][(k, i)] = corner_count[x].get((k, i), 0) + 1
    for v in ball.vertices:
        b = ball.rho[v]
        if ball.interior[v]:
            need = {x for x in base.ends[b] if not ball.directed or x[1] == "s"}
            have = {x for x in ball.adj[v] if not ball.directed or x[1] == "s"}
            if need != have:
                return Verdict(False, "covering", {"vertex": v, "kind": "edges"})
        if ball.square_complete[v]:
            need = {(k, i) for k, i, a, c in base.corners[b]
                    if not ball.directed or _is_source_corner(base, k, i)}
            have = corner_count[v]
            if set(have) != need or any(n != 1 for n in have.values()):
                return Verdict(False, "covering", {"vertex": v, "kind": "corners"})
    return Verdict(True, "covering")
