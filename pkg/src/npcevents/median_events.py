"""Median-graph fragments and the event structures they carry.

A :class:`DomainFragment` is a finite piece of a pointed median graph: the
1-skeleton of a cover ball, a truncated principal filter, or a small closed
complex such as a grid. Hyperplanes (Θ classes) of the fragment become
events; the configuration of a vertex is the set of classes separating it
from the basepoint, stored as an integer bitset.

Soundness near the cut is handled by a depth bound ``D``. Vertices with
depth at most ``D // 2`` form the resolved region: every geodesic between two
of them stays inside the fragment. A pair of events is resolved when the
union of their down-sets has size at most ``D``, which puts the witnessing
square or configuration inside the fragment.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import shortest_path

from .complex_core import SquareComplex, Verdict
from .errors import BoundaryUnsafe, UnknownVertex


@dataclass(eq=False)
class DomainFragment:
    vertices: list
    edges: dict          # name -> (src, dst)
    squares: list        # (corners, side edge names), sides in boundary order
    basepoint: str
    interior: dict
    bound: int | None    # depth bound D; None for closed fragments
    closed: bool = False
    is_filter: bool = False
    color: dict = field(default_factory=dict)
    vtype: dict = field(default_factory=dict)
    ambient: object = None
    name: str = ""
    base_edge: dict = field(default_factory=dict)

    # ---- adjacency
    @cached_property
    def out(self):
        o = {v: [] for v in self.vertices}
        for n, (s, d) in self.edges.items():
            o[s].append((n, d))
        for v in o:
            o[v].sort()
        return o

    @cached_property
    def inn(self):
        i = {v: [] for v in self.vertices}
        for n, (s, d) in self.edges.items():
            i[d].append((n, s))
        return i

    @cached_property
    def nbrs(self):
        nb = {v: set() for v in self.vertices}
        for s, d in self.edges.values():
            nb[s].add(d)
            nb[d].add(s)
        return nb

    @cached_property
    def index(self):
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def depth(self):
        """Graph distance from the basepoint inside the fragment."""
        dist = {self.basepoint: 0}
        dq = deque([self.basepoint])
        while dq:
            u = dq.popleft()
            for w in self.nbrs[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    dq.append(w)
        return dist

    @cached_property
    def resolved(self):
        if self.closed:
            return set(self.vertices)
        if self.bound is None:
            return set()
        return {v for v, d in self.depth.items() if 2 * d <= self.bound}

    # ---- Θ classes and configurations
    @cached_property
    def theta(self):
        """edge -> class representative (least edge name of the class)."""
        parent = {e: e for e in self.edges}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        for _, sides in self.squares:
            for a, b in ((sides[0], sides[2]), (sides[1], sides[3])):
                ra, rb = find(a), find(b)
                if ra != rb:
                    if rb < ra:
                        ra, rb = rb, ra
                    parent[rb] = ra
        classes = {}
        for e in self.edges:
            classes.setdefault(find(e), []).append(e)
        rep = {}
        for members in classes.values():
            m = min(members)
            for e in members:
                rep[e] = m
        return rep

    @cached_property
    def _events(self):
        depth = self.depth
        lowest = {}
        for e, c in self.theta.items():
            s, d = self.edges[e]
            if s not in depth or d not in depth:
                continue
            key = (min(depth[s], depth[d]), e)
            if c not in lowest or key < lowest[c]:
                lowest[c] = key
        order = sorted(lowest, key=lambda c: lowest[c])
        names = [lowest[c][1] for c in order]
        cidx = {c: i for i, c in enumerate(order)}
        return names, cidx, {c: lowest[c][1] for c in order}

    @property
    def event_names(self):
        """Events are named by their lowest dual edge."""
        return self._events[0]

    def event_of(self, edge):
        return self._events[1][self.theta[edge]]

    @cached_property
    def config(self):
        """vertex -> bitset of events separating it from the basepoint."""
        cidx = self._events[1]
        conf = {self.basepoint: 0}
        dq = deque([self.basepoint])
        adj = {v: [] for v in self.vertices}
        for n, (s, d) in self.edges.items():
            bit = 1 << cidx[self.theta[n]]
            adj[s].append((d, bit))
            adj[d].append((s, bit))
        while dq:
            u = dq.popleft()
            for w, bit in adj[u]:
                if w not in conf:
                    conf[w] = conf[u] ^ bit
                    dq.append(w)
        return conf

    @cached_property
    def vertex_of_config(self):
        return {c: v for v, c in self.config.items()}

    def counts(self):
        return (len(self.vertices), len(self.edges), len(self.squares))

    def to_dict(self):
        return {
            "name": self.name, "basepoint": self.basepoint, "bound": self.bound,
            "closed": self.closed, "is_filter": self.is_filter,
            "vertices": [{"name": v, "interior": self.interior.get(v, False),
                          "type": self.vtype.get(v)} for v in self.vertices],
            "edges": [{"name": n, "src": s, "dst": d, "color": self.color.get(n),
                       "base": self.base_edge.get(n)} for n, (s, d) in self.edges.items()],
            "squares": [{"corners": list(c), "sides": list(s)} for c, s in self.squares],
        }

    @classmethod
    def from_dict(cls, d):
        return cls([v["name"] for v in d["vertices"]],
                   {e["name"]: (e["src"], e["dst"]) for e in d["edges"]},
                   [(tuple(q["corners"]), tuple(q["sides"])) for q in d["squares"]],
                   d["basepoint"], {v["name"]: v["interior"] for v in d["vertices"]},
                   d["bound"], d["closed"], d["is_filter"],
                   {e["name"]: e["color"] for e in d["edges"] if e.get("color") is not None},
                   {v["name"]: v["type"] for v in d["vertices"] if v.get("type") is not None},
                   None, d.get("name", ""),
                   {e["name"]: e["base"] for e in d["edges"] if e.get("base") is not None})


# ---------------------------------------------------------------- constructors

def fragment_from_ball(ball):
    """The whole ball as a fragment pointed at its centre."""
    edges = {n: (s, d) for n, (s, d, _) in ball.edges.items()}
    squares = [(cs, tuple(e for e, _ in sides)) for _, _, cs, sides in ball.squares]
    color = {n: ball.base.edge[e].color for n, (_, _, e) in ball.edges.items()}
    vtype = {v: ball.vtype(v) for v in ball.vertices if ball.vtype(v) is not None}
    return DomainFragment(list(ball.vertices), edges, squares, ball.basepoint,
                          dict(ball.interior), ball.radius, False, ball.directed,
                          color, vtype, None, f"ball({ball.base.name})",
                          {n: e for n, (_, _, e) in ball.edges.items()})


def principal_filter(ball, v, depth=None):
    """Truncated principal filter of ``v`` inside ``ball``.

    The default depth is the largest one the ball certifies; asking for more
    raises BoundaryUnsafe.
    """
    if v not in ball.adj:
        raise UnknownVertex(v)
    if ball.radius is not None:
        safe = ball.radius - ball.dist[v]
        if depth is None:
            depth = safe
        elif depth > safe:
            raise BoundaryUnsafe(f"depth {depth} exceeds the certified {safe} at {v}")
    elif depth is None:
        raise BoundaryUnsafe("ball has no radius; pass an explicit depth")
    level = {v: 0}
    dq = deque([v])
    while dq:
        x = dq.popleft()
        if level[x] == depth:
            continue
        if not ball.interior[x]:
            raise BoundaryUnsafe(f"{x} at level {level[x]} is not interior")
        for _, w in ball.out(x):
            if w not in level:
                level[w] = level[x] + 1
                dq.append(w)
    keep = set(level)
    edges = {n: (s, d) for n, (s, d, _) in ball.edges.items() if s in keep and d in keep}
    squares = [(cs, tuple(e for e, _ in sides)) for _, _, cs, sides in ball.squares
               if all(x in keep for x in cs)]
    color = {n: ball.base.edge[ball.edges[n][2]].color for n in edges}
    vtype = {x: ball.vtype(x) for x in keep if ball.vtype(x) is not None}
    verts = sorted(keep, key=lambda x: (level[x], x))
    interior = {x: level[x] < depth for x in verts}
    return DomainFragment(verts, edges, squares, v, interior, depth, False, True,
                          color, vtype, ball, f"filter({v})",
                          {n: ball.edges[n][2] for n in edges})


def from_complex(c, basepoint, name=None):
    """Read a finite complex directly as a closed fragment (grids, trees)."""
    if basepoint not in c.ends:
        raise UnknownVertex(basepoint)
    edges = {e.name: (e.src, e.dst) for e in c.edges}
    squares = []
    for q in c.squares:
        cs = []
        for e, s in q:
            ed = c.edge[e]
            cs.append(ed.src if s > 0 else ed.dst)
        squares.append((tuple(cs), tuple(e for e, _ in q)))
    color = {e.name: e.color for e in c.edges if e.color is not None}
    return DomainFragment(list(c.vertices), edges, squares, basepoint,
                          {v: True for v in c.vertices}, None, True, True,
                          color, dict(c.types), None, name or c.name,
                          {e.name: e.name for e in c.edges})


def grid_complex(n, m=None):
    """Directed grid with ``n`` by ``m`` vertices, edges pointing right and up."""
    from .complex_core import Edge
    m = n if m is None else m
    vs = [f"{i},{j}" for j in range(m) for i in range(n)]
    edges, squares = [], []
    for j in range(m):
        for i in range(n):
            if i + 1 < n:
                edges.append(Edge(f"h{i},{j}", f"{i},{j}", f"{i + 1},{j}", f"h{i}", "H"))
            if j + 1 < m:
                edges.append(Edge(f"v{i},{j}", f"{i},{j}", f"{i},{j + 1}", f"v{j}", "V"))
    for j in range(m - 1):
        for i in range(n - 1):
            squares.append(((f"h{i},{j}", 1), (f"v{i + 1},{j}", 1),
                            (f"h{i},{j + 1}", -1), (f"v{i},{j}", -1)))
    return SquareComplex(vs, edges, squares, {}, f"grid{n}x{m}")


def tree_complex(branching, depth):
    """Rooted tree with every edge pointing away from the root."""
    from .complex_core import Edge
    vs, edges = ["r"], []
    frontier = ["r"]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for k in range(branching):
                w = f"{u}.{k}"
                vs.append(w)
                edges.append(Edge(f"{w}^", u, w))
                nxt.append(w)
        frontier = nxt
    return SquareComplex(vs, edges, [], {}, f"tree{branching}^{depth}")


def grid_fragment(n, m=None):
    return from_complex(grid_complex(n, m), "0,0")


def tree_fragment(branching, depth):
    return from_complex(tree_complex(branching, depth), "r")


# ---------------------------------------------------------------- distances, intervals, medians

@dataclass
class DistanceTable:
    sources: list
    index: dict
    matrix: np.ndarray      # len(sources) x len(vertices)


def _adjacency(frag):
    n = len(frag.vertices)
    idx = frag.index
    rows, cols = [], []
    for s, d in frag.edges.values():
        rows += [idx[s], idx[d]]
        cols += [idx[d], idx[s]]
    return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


def distance_table(frag, sources):
    sources = list(sources)
    if not sources:
        return DistanceTable([], {}, np.zeros((0, len(frag.vertices))))
    mat = shortest_path(_adjacency(frag), unweighted=True, directed=False,
                        indices=[frag.index[s] for s in sources])
    mat = np.atleast_2d(mat)
    return DistanceTable(sources, {s: i for i, s in enumerate(sources)}, mat)


def _require_resolved(frag, *vs):
    for v in vs:
        if v not in frag.index:
            raise UnknownVertex(v)
        if v not in frag.resolved:
            raise BoundaryUnsafe(f"{v} lies outside the resolved region")


def interval(frag, u, w):
    _require_resolved(frag, u, w)
    t = distance_table(frag, [u, w])
    du, dw = t.matrix[0], t.matrix[1]
    total = du[frag.index[w]]
    return {frag.vertices[i] for i in np.nonzero(du + dw == total)[0]}


def median(frag, u, w, z):
    common = interval(frag, u, w) & interval(frag, w, z) & interval(frag, z, u)
    if len(common) != 1:
        return None
    return next(iter(common))


def _bits(mask):
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def median_check(frag, limit=None):
    """Every triple of resolved vertices has exactly one median."""
    R = sorted(frag.resolved, key=lambda v: frag.index[v])
    if limit is not None:
        R = R[:limit]
    t = distance_table(frag, R)
    M = t.matrix
    ri = [frag.index[v] for v in R]
    iv = {}
    for a in range(len(R)):
        for b in range(a + 1, len(R)):
            iv[(a, b)] = _bits(M[a] + M[b] == M[a, ri[b]])
    checked = 0
    for a, b, c in itertools.combinations(range(len(R)), 3):
        m = iv[(a, b)] & iv[(b, c)] & iv[(a, c)]
        checked += 1
        if m == 0 or m & (m - 1):
            meds = [frag.vertices[i] for i in range(len(frag.vertices)) if m >> i & 1]
            return Verdict(False, "median", {"triple": [R[a], R[b], R[c]], "medians": meds},
                           {"triples": checked})
    return Verdict(True, "median", None, {"triples": checked, "vertices": len(R)})


def check_three_cube(frag):
    """Three squares pairwise sharing an edge around a vertex would need a cube."""
    at = {}
    for k, (cs, sides) in enumerate(frag.squares):
        for i, x in enumerate(cs):
            a, b = sides[i - 1], sides[i]
            at.setdefault(x, []).append((k, frozenset((a, b))))
    for x in sorted(at):
        lst = at[x]
        adj = {}
        for k, pair in lst:
            a, b = sorted(pair)
            adj.setdefault(a, {})[b] = k
            adj.setdefault(b, {})[a] = k
        for a in sorted(adj):
            for b in sorted(adj[a]):
                if b <= a:
                    continue
                for c in sorted(adj[b]):
                    if c <= b or c not in adj[a]:
                        continue
                    ks = sorted((adj[a][b], adj[b][c], adj[a][c]))
                    return Verdict(False, "three_cube",
                                   {"vertex": x, "edges": [a, b, c], "squares": ks})
    return Verdict(True, "three_cube")


@dataclass
class ThetaReport:
    classes: dict           # class representative -> member edges
    halfspaces: dict        # class -> (side with basepoint, other side) over resolved vertices
    boundary: list          # classes touching non-interior vertices

    def to_dict(self):
        return {"classes": {c: sorted(m) for c, m in self.classes.items()},
                "boundary": self.boundary}


def theta_classes(frag):
    classes = {}
    for e, c in frag.theta.items():
        classes.setdefault(c, []).append(e)
    conf = frag.config
    ev = frag._events[1]
    half = {}
    for c in classes:
        bit = 1 << ev[c]
        near = sorted(v for v in frag.resolved if not conf[v] & bit)
        far = sorted(v for v in frag.resolved if conf[v] & bit)
        half[c] = (near, far)
    boundary = sorted(c for c, ms in classes.items()
                      if any(not frag.interior.get(x, False) for e in ms for x in frag.edges[e]))
    return ThetaReport(classes, half, boundary)


def theta_consistency(frag):
    """Every edge flips exactly its own class and configuration size is distance."""
    conf = frag.config
    ev = frag._events[1]
    for n in sorted(frag.edges):
        s, d = frag.edges[n]
        bit = 1 << ev[frag.theta[n]]
        if conf[s] ^ conf[d] != bit:
            return Verdict(False, "theta", {"edge": n, "kind": "flip"})
    dist = frag.depth
    for v in frag.vertices:
        if bin(conf[v]).count("1") != dist[v]:
            return Verdict(False, "theta", {"vertex": v, "kind": "distance"})
    return Verdict(True, "theta", None, {"classes": len(set(frag.theta.values()))})


def class_orientation(frag):
    """All edges of a Θ class point away from the basepoint's halfspace."""
    conf = frag.config
    ev = frag._events[1]
    direction = {}
    for n in sorted(frag.edges):
        s, _ = frag.edges[n]
        c = frag.theta[n]
        way = not conf[s] & (1 << ev[c])
        if direction.setdefault(c, way) != way:
            return Verdict(False, "class_orientation", {"edge": n, "class": c})
    return Verdict(True, "class_orientation")


def order_agreement_check(ambient, v):
    """Filter of ``v`` versus halfspaces and the basepoint order, on the resolved region.

    ``ambient`` is a fragment containing ``v`` with an orientation; checks
    (i) u is reachable from v iff every class separating them points away
    from v, (ii) reachability between filter vertices equals x ∈ I(v, y), and
    (iii) local convexity of the filter.
    """
    _require_resolved(ambient, v)
    R = sorted(ambient.resolved, key=lambda x: ambient.index[x])
    reach_v = _reach(ambient, v)
    conf = ambient.config
    ev = ambient._events[1]
    away = {}
    for n, (s, d) in ambient.edges.items():
        c = ambient.theta[n]
        away[ev[c]] = (conf[s] >> ev[c]) & 1  # 0 when the edge leaves the basepoint side
    checked = 0
    for u in R:
        sep = conf[v] ^ conf[u]
        ok = True
        i = 0
        while sep >> i:
            if sep >> i & 1:
                v_side = conf[v] >> i & 1
                if away[i] != v_side:
                    ok = False
                    break
            i += 1
        checked += 1
        if ok != (u in reach_v):
            return Verdict(False, "order_agreement",
                           {"kind": "halfspaces", "vertex": u, "in_filter": u in reach_v})
    F = [u for u in R if u in reach_v]
    t = distance_table(ambient, F)
    dv = t.matrix[t.index[v]]
    for x in F:
        rx = _reach(ambient, x)
        dx = t.matrix[t.index[x]]
        for y in F:
            between = dv[ambient.index[x]] + dx[ambient.index[y]] == dv[ambient.index[y]]
            if (y in rx) != between:
                return Verdict(False, "order_agreement",
                               {"kind": "order", "pair": [x, y], "reachable": y in rx})
    Fs = set(F)
    for a, b in itertools.combinations(F, 2):
        if t.matrix[t.index[a], ambient.index[b]] == 2:
            for w in ambient.nbrs[a] & ambient.nbrs[b]:
                if w not in reach_v:
                    return Verdict(False, "order_agreement",
                                   {"kind": "convexity", "pair": [a, b], "outside": w})
    return Verdict(True, "order_agreement", None, {"vertices": checked, "filter": len(Fs)})


def _reach(frag, x):
    seen = {x}
    dq = deque([x])
    while dq:
        u = dq.popleft()
        for _, w in frag.out[u]:
            if w not in seen:
                seen.add(w)
                dq.append(w)
    return seen


# ---------------------------------------------------------------- events

def _popcount(x):
    return bin(x).count("1")


@dataclass(eq=False)
class EventFragment:
    frag: DomainFragment
    events: list
    down: list              # bitsets ↓e
    leq: np.ndarray
    conflict: np.ndarray
    concurrent: np.ndarray
    mu: np.ndarray
    coinit: np.ndarray
    resolved: np.ndarray
    s: int
    coinit_at: dict         # (i, j) -> set of witnessing vertices with depth <= s
    cap_hit: bool

    @property
    def n(self):
        return len(self.events)

    def idx(self, name):
        return self.events.index(name)

    def relation(self, i, j):
        if not self.resolved[i, j]:
            return "unresolved"
        if i == j:
            return "equal"
        if self.leq[i, j]:
            return "leq"
        if self.leq[j, i]:
            return "geq"
        if self.concurrent[i, j]:
            return "concurrent"
        return "mu" if self.mu[i, j] else "conflict"

    @cached_property
    def covers(self):
        """Immediate causality pairs i ⋖ j."""
        out = set()
        for j in range(self.n):
            below = [i for i in range(self.n) if i != j and self.down[j] >> i & 1]
            for i in below:
                if not any(k != i and self.down[k] >> i & 1 for k in below):
                    out.add((i, j))
        return out

    @cached_property
    def tip_events(self):
        fr = self.frag
        tips = set()
        for i, name in enumerate(self.events):
            s, d = fr.edges[name]
            if fr.vtype.get(d) == 3:
                tips.add(i)
        return tips

    def to_dict(self):
        def pairs(mat):
            return [[self.events[i], self.events[j]] for i, j in zip(*np.nonzero(np.triu(mat, 1)))]
        nat = natural_relation(self)
        return {
            "events": self.events,
            "leq": [[self.events[i], self.events[j]] for i, j in zip(*np.nonzero(self.leq)) if i != j],
            "conflict": pairs(self.conflict),
            "concurrent": pairs(self.concurrent),
            "minimal_conflict": pairs(self.mu),
            "natural": [[self.events[i], self.events[j]] for i, j in sorted(nat.pairs)],
            "unresolved": pairs(~self.resolved),
            "config_bound": self.s,
            "cap_hit": self.cap_hit,
        }

    def natural_dot(self):
        nat = natural_relation(self)
        lines = ["graph natural {"]
        for e in self.events:
            lines.append(f'  "{e}";')
        for i, j in sorted(nat.pairs):
            lines.append(f'  "{self.events[i]}" -- "{self.events[j]}" [clause="{nat.clause[(i, j)]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def events_from_filter(frag, s=8):
    names, cidx, lowest = frag._events
    n = len(names)
    conf = frag.config
    depth = frag.depth
    down = []
    for name in names:
        a, b = frag.edges[name]
        head = a if depth[a] > depth[b] else b
        down.append(conf[head])
    sizes = np.array([_popcount(d) for d in down])
    rows, cols = [], []
    for j, d in enumerate(down):
        i = 0
        while d >> i:
            if d >> i & 1:
                rows.append(j)
                cols.append(i)
            i += 1
    Dn = sparse.csr_matrix((np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(n, n))
    leq = Dn.T.toarray().astype(bool)          # leq[i, j]: i in ↓j
    inter = (Dn @ Dn.T).toarray()
    union = sizes[:, None] + sizes[None, :] - inter
    if frag.closed:
        resolved = np.ones((n, n), dtype=bool)
    elif frag.bound is None:
        resolved = np.zeros((n, n), dtype=bool)
    else:
        resolved = union <= frag.bound
    conc = np.zeros((n, n), dtype=bool)
    for _, sides in frag.squares:
        a, b = cidx[frag.theta[sides[0]]], cidx[frag.theta[sides[1]]]
        conc[a, b] = conc[b, a] = True
    comparable = leq | leq.T
    conc &= ~comparable
    conflict = resolved & ~comparable & ~conc
    coinit = np.zeros((n, n), dtype=bool)
    coinit_at = {}
    limit = frag.bound - 1 if frag.bound is not None else None
    for v in frag.vertices:
        dv = depth[v]
        if limit is not None and dv > limit:
            continue
        en = sorted(cidx[frag.theta[e]] for e, _ in frag.out[v])
        for a, b in itertools.combinations(en, 2):
            coinit[a, b] = coinit[b, a] = True
            if dv <= s:
                coinit_at.setdefault((a, b), set()).add(v)
    mu = conflict & coinit
    cap_hit = not frag.closed and (frag.bound is None or s < frag.bound - 1)
    return EventFragment(frag, list(names), down, leq, conflict, conc, mu, coinit,
                         resolved, s, coinit_at, cap_hit)


def event_axioms(ef):
    """Partial order, irreflexive symmetric conflict, inheritance, partition."""
    leq, cf, res = ef.leq, ef.conflict, ef.resolved
    n = ef.n
    if not np.all(np.diag(leq)):
        return Verdict(False, "events", {"kind": "reflexive"})
    if np.any(leq & leq.T & ~np.eye(n, dtype=bool)):
        return Verdict(False, "events", {"kind": "antisymmetric"})
    L = leq.astype(np.int32)
    if np.any(((L @ L) > 0) & ~leq):
        return Verdict(False, "events", {"kind": "transitive"})
    if np.any(np.diag(cf)) or np.any(cf != cf.T):
        return Verdict(False, "events", {"kind": "conflict"})
    # e # e' and e' <= e'' => e # e'' (on resolved pairs)
    inh = ((cf.astype(np.int32) @ L) > 0) & res
    bad = inh & ~cf
    if np.any(bad):
        i, j = map(int, np.argwhere(bad)[0])
        return Verdict(False, "events", {"kind": "inheritance", "pair": [ef.events[i], ef.events[j]]})
    off = res & ~np.eye(n, dtype=bool)
    parts = (leq | leq.T).astype(int) + ef.concurrent.astype(int) + cf.astype(int)
    if np.any(parts[off] != 1):
        return Verdict(False, "events", {"kind": "partition"})
    return Verdict(True, "events", None, {"events": n, "resolved_pairs": int(off.sum() // 2)})


def relation_cross_check(ef):
    """Concurrency from squares agrees with the configuration lookup."""
    table = ef.frag.vertex_of_config
    n = ef.n
    for i in range(n):
        for j in range(i + 1, n):
            if not ef.resolved[i, j] or ef.leq[i, j] or ef.leq[j, i]:
                continue
            joint = (ef.down[i] | ef.down[j]) in table
            if joint != bool(ef.concurrent[i, j]):
                return Verdict(False, "relations", {"pair": [ef.events[i], ef.events[j]]})
    return Verdict(True, "relations")


def enumerate_configurations(ef, s):
    """Conflict-free down-closed event sets of size at most ``s`` (as bitsets)."""
    n = ef.n
    found = {0}
    layer = {0}
    for _ in range(s):
        nxt = set()
        for c in layer:
            for e in range(n):
                if c >> e & 1:
                    continue
                below = ef.down[e] & ~(1 << e)
                if below & ~c:
                    continue
                members = [i for i in range(n) if c >> i & 1]
                if any(not ef.resolved[e, i] for i in members):
                    raise BoundaryUnsafe("configuration enumeration reached unresolved pairs")
                if any(ef.conflict[e, i] for i in members):
                    continue
                nxt.add(c | (1 << e))
        nxt -= found
        found |= nxt
        layer = nxt
    return found


def domain_roundtrip(ef, s):
    if not ef.frag.closed and (ef.frag.bound is None or ef.frag.bound < s):
        raise BoundaryUnsafe(f"round trip at size {s} needs a depth bound of at least {s}")
    confs = enumerate_configurations(ef, s)
    verts = {c for v, c in ef.frag.config.items() if ef.frag.depth[v] <= s}
    if confs == verts:
        return Verdict(True, "domain_roundtrip", None, {"configurations": len(confs)})
    extra = sorted(confs - verts)[:1]
    missing = sorted(verts - confs)[:1]
    return Verdict(False, "domain_roundtrip", {"extra": extra, "missing": missing},
                   {"configurations": len(confs), "vertices": len(verts)})


# ---------------------------------------------------------------- the ♮ relation

@dataclass
class Natural:
    pairs: set
    clause: dict            # pair -> "1" | "2" | "3"

    def matrix(self, n):
        m = np.zeros((n, n), dtype=bool)
        for i, j in self.pairs:
            m[i, j] = m[j, i] = True
        return m


def natural_relation(ef):
    """Symmetrised union of ∥, #μ and the co-initial clause, on resolved pairs.

    Clause 3 needs an e3 with e1 ∥ e3 and e2 #μ e3, co-initial with e1 and
    with e2 at two different configurations; witnesses are configurations of
    size at most ``ef.s``.
    """
    if "_natural" in ef.__dict__:
        return ef.__dict__["_natural"]
    n = ef.n
    res = ef.resolved
    pairs, clause = set(), {}
    for i, j in zip(*np.nonzero(np.triu(ef.concurrent & res, 1))):
        pairs.add((int(i), int(j)))
        clause[(int(i), int(j))] = "1"
    for i, j in zip(*np.nonzero(np.triu(ef.mu & res, 1))):
        p = (int(i), int(j))
        if p not in pairs:
            pairs.add(p)
            clause[p] = "2"

    def at(a, b):
        return ef.coinit_at.get((min(a, b), max(a, b)), set())
    for e3 in range(n):
        conc = [e1 for e1 in range(n) if ef.concurrent[e1, e3] and res[e1, e3] and at(e1, e3)]
        mus = [e2 for e2 in range(n) if ef.mu[e2, e3] and res[e2, e3] and at(e2, e3)]
        for e1 in conc:
            A = at(e1, e3)
            for e2 in mus:
                if e1 == e2 or not res[e1, e2]:
                    continue
                p = (min(e1, e2), max(e1, e2))
                if p in pairs:
                    continue
                B = at(e2, e3)
                if len(A | B) >= 2:
                    pairs.add(p)
                    clause[p] = "3"
    nat = Natural(pairs, clause)
    ef.__dict__["_natural"] = nat
    return nat


def natural_clique_max(ef, prune_tips=False):
    """Exact maximum ♮-clique size.

    With ``prune_tips`` the search keeps at most one tip event per clique,
    which is valid on fragments where two tip events are never ♮-related.
    """
    nat = natural_relation(ef)
    G = nx.Graph()
    G.add_nodes_from(range(ef.n))
    G.add_edges_from(nat.pairs)
    if not prune_tips:
        clique, size = nx.max_weight_clique(G, weight=None)
        return size, sorted(ef.events[i] for i in clique)
    tips = ef.tip_events
    for a, b in nat.pairs:
        if a in tips and b in tips:
            raise ValueError("two tip events are related; pruning is not valid here")
    core = G.subgraph([i for i in G if i not in tips])
    best, arg = nx.max_weight_clique(core, weight=None)
    best_size = len(best)
    for t in sorted(tips):
        sub = G.subgraph([t] + [i for i in G[t] if i not in tips])
        cl, sz = nx.max_weight_clique(sub, weight=None)
        if sz > best_size:
            best, best_size = cl, sz
    return best_size, sorted(ef.events[i] for i in best)


# ---------------------------------------------------------------- flats and hyperbolicity

def _square_index(frag):
    """(out edge, out edge) at a source corner -> far corner."""
    idx = {}
    for cs, sides in frag.squares:
        for i, x in enumerate(cs):
            a, b = sides[i - 1], sides[i]
            if frag.edges[a][0] == x and frag.edges[b][0] == x:
                idx[(a, b)] = cs[(i + 2) % 4]
                idx[(b, a)] = cs[(i + 2) % 4]
    return idx


def _complete_grid(frag, sq, bottom, left):
    """Fill the grid spanned by two directed vertex paths from a common corner."""
    n = len(bottom)
    m = len(left)
    g = {}
    for i, x in enumerate(bottom):
        g[(i, 0)] = x
    for j, x in enumerate(left):
        g[(0, j)] = x
    for j in range(m - 1):
        for i in range(n - 1):
            x = g[(i, j)]
            r, u = g[(i + 1, j)], g[(i, j + 1)]
            er = _edge_between(frag, x, r)
            eu = _edge_between(frag, x, u)
            if er is None or eu is None:
                return None
            far = sq.get((er, eu))
            if far is None:
                return None
            g[(i + 1, j + 1)] = far
    return g


def _edge_between(frag, x, y):
    for n, w in frag.out[x]:
        if w == y:
            return n
    return None


def _grid_isometric(frag, g):
    conf = frag.config
    items = list(g.items())
    if len({v for _, v in items}) != len(items):
        return False
    for (p, x), (q, y) in itertools.combinations(items, 2):
        if _popcount(conf[x] ^ conf[y]) != abs(p[0] - q[0]) + abs(p[1] - q[1]):
            return False
    return True


def flat_grid_max(frag, beam=64, roots=None):
    """Largest n such that an n-by-n vertex grid embeds isometrically and directedly.

    Grids are rooted at resolved vertices and grown one row and one column at
    a time; every candidate is verified exactly against configuration
    distances. Returns (n, witness grid).
    """
    sq = _square_index(frag)
    cidx = frag._events[1]
    roots = sorted(frag.resolved if roots is None else roots, key=lambda v: frag.index[v])
    best, witness = (1, {(0, 0): roots[0]}) if roots else (0, {})
    for x in roots:
        if not frag.interior.get(x, False):
            continue
        outs = frag.out[x]
        layer = []
        for (eb, wb), (el, wl) in itertools.permutations(outs, 2):
            if cidx[frag.theta[eb]] >= cidx[frag.theta[el]]:
                continue
            g = _complete_grid(frag, sq, [x, wb], [x, wl])
            if g is not None and _grid_isometric(frag, g):
                layer.append(([x, wb], [x, wl], g))
        size = 2
        while layer:
            if size > best:
                best, witness = size, layer[0][2]
            nxt = []
            for bottom, left, _ in layer:
                b_end, l_end = bottom[-1], left[-1]
                if not (frag.interior.get(b_end) and frag.interior.get(l_end)):
                    continue
                for _, wb in frag.out[b_end]:
                    for _, wl in frag.out[l_end]:
                        g = _complete_grid(frag, sq, bottom + [wb], left + [wl])
                        if g is not None and _grid_isometric(frag, g):
                            nxt.append((bottom + [wb], left + [wl], g))
                            if len(nxt) >= beam:
                                break
                    if len(nxt) >= beam:
                        break
                if len(nxt) >= beam:
                    break
            layer = nxt
            size += 1
    return best, witness


def four_point_delta(frag, exhaustive_limit=200_000, samples=50_000, seed=0):
    """Gromov four-point δ over resolved vertices, as an exact fraction."""
    R = sorted(frag.resolved, key=lambda v: frag.index[v])
    if len(R) < 4:
        return Fraction(0)
    t = distance_table(frag, R)
    ri = [frag.index[v] for v in R]
    D = t.matrix[:, ri].astype(np.int64)
    n = len(R)
    total = n * (n - 1) * (n - 2) * (n - 3) // 24
    if total <= exhaustive_limit:
        quads = np.array(list(itertools.combinations(range(n), 4)), dtype=np.int64)
    else:
        rng = random.Random(seed)
        quads = np.array([rng.sample(range(n), 4) for _ in range(samples)], dtype=np.int64)
    a, b, c, d = quads.T
    sums = np.stack([D[a, b] + D[c, d], D[a, c] + D[b, d], D[a, d] + D[b, c]], axis=1)
    sums.sort(axis=1)
    worst = int((sums[:, 2] - sums[:, 1]).max())
    return Fraction(worst, 2)


def fragment_summary(frag):
    return {"name": frag.name, "counts": frag.counts(), "basepoint": frag.basepoint,
            "bound": frag.bound, "resolved": len(frag.resolved),
            "classes": len(set(frag.theta.values()))}


def to_json(obj):
    return json.dumps(obj, sort_keys=True, default=str)
