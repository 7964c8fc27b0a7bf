"""Edge labelings of domain fragments.

A labeling assigns a symbol to every Θ class (or, for the hyperplane
labeling of a special complex, to every base edge, which amounts to the same
thing on a cover). Determinism at each vertex is what makes a labeling nice;
trace labelings also carry an independence relation.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from . import _iso
from .complex_core import Verdict
from .errors import (BoundaryUnsafe, MissingIndependence, NotNice, UnknownVertex,
                     UnlabeledClass, WordsEqual)
from .special import base_hyperplanes, intersecting_pairs


@dataclass
class EdgeLabeling:
    alphabet: tuple
    by_class: dict = field(default_factory=dict)    # event name -> symbol
    by_base: dict = field(default_factory=dict)     # base edge -> symbol
    independence: frozenset | None = None

    def __post_init__(self):
        if self.independence is not None:
            for a, b in self.independence:
                if a == b:
                    raise ValueError(f"independence must be irreflexive: ({a}, {b})")
                if (b, a) not in self.independence:
                    raise ValueError(f"independence must be symmetric: ({a}, {b})")

    def edge_label(self, frag, edge):
        if self.by_base:
            b = frag.base_edge.get(edge)
            if b in self.by_base:
                return self.by_base[b]
        ev = frag._events[2].get(frag.theta[edge])
        if ev in self.by_class:
            return self.by_class[ev]
        raise UnlabeledClass(f"class of {edge} has no label")

    def event_label(self, frag, i):
        return self.edge_label(frag, frag.event_names[i])

    def dependent(self, a, b):
        if self.independence is None:
            raise MissingIndependence("labeling has no independence relation")
        return (a, b) not in self.independence

    def to_dict(self):
        return {"alphabet": list(self.alphabet), "by_class": self.by_class,
                "by_base": self.by_base,
                "independence": None if self.independence is None
                else sorted([list(p) for p in self.independence])}

    @classmethod
    def from_dict(cls, d):
        ind = d.get("independence")
        return cls(tuple(d["alphabet"]), dict(d.get("by_class") or {}), dict(d.get("by_base") or {}),
                   None if ind is None else frozenset(tuple(p) for p in ind))

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def check_nice(lam, frag):
    for v in frag.vertices:
        seen = {}
        for e, _ in frag.out[v]:
            a = lam.edge_label(frag, e)
            if a in seen:
                return Verdict(False, "nice", {"vertex": v, "edges": [seen[a], e], "label": a})
            seen[a] = e
    for cs, sides in frag.squares:
        for i in (0, 1):
            if lam.edge_label(frag, sides[i]) != lam.edge_label(frag, sides[i + 2]):
                return Verdict(False, "nice", {"square": list(cs), "edges": [sides[i], sides[i + 2]]})
    return Verdict(True, "nice")


# ---------------------------------------------------------------- search

def _conflict_graph(frag):
    """Classes that leave a common vertex must get different labels."""
    names, cidx, _ = frag._events
    nbr = [set() for _ in names]
    for v in frag.vertices:
        cls = [cidx[frag.theta[e]] for e, _ in frag.out[v]]
        for a in cls:
            for b in cls:
                if a != b:
                    nbr[a].add(b)
    return names, [sorted(s) for s in nbr]


def iter_nice(frag, k, limit=None):
    """Yield nice labelings with symbols 0..k-1, up to relabeling.

    Classes are taken in order of first appearance from the basepoint; class
    i may only use a symbol at most one above the largest used so far.
    Forward checking keeps a bitmask of the symbols still open per class.
    """
    names, nbr = _conflict_graph(frag)
    n = len(names)
    full = (1 << k) - 1
    label = [-1] * n
    domain = [full] * n
    trail = []          # (class, old domain) for undo
    stack = []          # per position: remaining candidate symbols, trail mark
    produced = 0

    def candidates(i, top):
        allowed = domain[i] & ((1 << min(k, top + 2)) - 1)
        return [s for s in range(k) if allowed >> s & 1]

    tops = [-1] * (n + 1)
    if n == 0:
        yield EdgeLabeling(tuple(range(k)), {})
        return
    stack.append((candidates(0, -1), len(trail)))
    while stack:
        cands, mark = stack[-1]
        i = len(stack) - 1
        # undo the previous choice at this level
        while len(trail) > mark:
            j, old = trail.pop()
            domain[j] = old
        label[i] = -1
        if not cands:
            stack.pop()
            continue
        s = cands.pop(0)
        label[i] = s
        ok = True
        bit = 1 << s
        for j in nbr[i]:
            if j > i and domain[j] & bit:
                trail.append((j, domain[j]))
                domain[j] &= ~bit
                if domain[j] == 0:
                    ok = False
                    break
        if not ok:
            continue
        tops[i + 1] = max(tops[i], s)
        if i + 1 == n:
            yield EdgeLabeling(tuple(range(k)), {names[c]: label[c] for c in range(n)})
            produced += 1
            if limit is not None and produced >= limit:
                return
            continue
        stack.append((candidates(i + 1, tops[i + 1]), len(trail)))


def search_nice(frag, k):
    """First nice labeling with k symbols, or None when none exists."""
    for lam in iter_nice(frag, k, limit=1):
        return lam
    return None


# ---------------------------------------------------------------- trace labelings

def check_trace(lam, ef):
    """LES1-3 on every resolved pair of events.

    LES1: minimal conflict forces different labels.
    LES2: immediate causality and minimal conflict force dependent labels.
    LES3: dependent labels force causality or conflict.
    """
    if lam.independence is None:
        raise MissingIndependence("trace check needs an independence relation")
    frag = ef.frag
    lab = [lam.event_label(frag, i) for i in range(ef.n)]
    first = {}
    unresolved = 0
    covers = ef.covers
    for i in range(ef.n):
        for j in range(i + 1, ef.n):
            if not ef.resolved[i, j]:
                unresolved += 1
                continue
            dep = lam.dependent(lab[i], lab[j])
            pair = [ef.events[i], ef.events[j]]
            if ef.mu[i, j] and lab[i] == lab[j]:
                first.setdefault("LES1", pair)
            if ((i, j) in covers or (j, i) in covers or ef.mu[i, j]) and not dep:
                first.setdefault("LES2", pair)
            if dep and ef.concurrent[i, j]:
                first.setdefault("LES3", pair)
    info = {"violated": sorted(first), "unresolved_pairs": unresolved}
    if first:
        return Verdict(False, "trace", first, info)
    return Verdict(True, "trace", None, info)


def canonical_hyperplane_labeling(base, ball=None):
    """Label every cover edge by the base hyperplane of its projection.

    Two labels are independent when the hyperplanes are distinct and cross.
    """
    hps = base_hyperplanes(base)
    by_base = {e: h.id for h in hps for e in h.edges}
    ind = set()
    for pair in intersecting_pairs(base):
        a, b = sorted(pair)
        ind.add((a, b))
        ind.add((b, a))
    return EdgeLabeling(tuple(h.id for h in hps), {}, by_base, frozenset(ind))


# which trace axiom each specialness pathology breaks; (b) is caught earlier,
# since a one-sided hyperplane admits no orientation to build filters from
PATHOLOGY_AXIOM = {"a": "LES3", "c": "LES1", "e": "LES2"}


def hyperplane_trace_check(c, vertex=None, radius=4, s=6, budget=None):
    """Canonical hyperplane labeling checked on the directed filter of a lift."""
    from . import cover, median_events
    v = vertex or c.vertices[0]
    kw = {} if budget is None else {"budget": budget}
    ball = cover.unfold_filter(c, v, radius, **kw)
    ef = median_events.events_from_filter(median_events.fragment_from_ball(ball), s=s)
    return check_trace(canonical_hyperplane_labeling(c), ef)


# ---------------------------------------------------------------- labeled filters

def _labeled_filter(frag, lam, v, d):
    if v not in frag.index:
        raise UnknownVertex(v)
    level = {v: 0}
    dq = deque([v])
    while dq:
        x = dq.popleft()
        if level[x] == d:
            continue
        if not frag.interior.get(x, False):
            raise BoundaryUnsafe(f"{x} at level {level[x]} is not interior")
        for _, w in frag.out[x]:
            if w not in level:
                level[w] = level[x] + 1
                dq.append(w)
    out = {}
    for x in level:
        if level[x] < d:
            out[x] = [(frag.color.get(e) if lam is None else lam.edge_label(frag, e), w)
                      for e, w in frag.out[x]]
        else:
            out[x] = []
    vattr = {x: frag.vtype.get(x) for x in level}
    return (v, vattr, out)


def labeled_filter_iso(frag, lam, v1, v2, d):
    """Directed, label- and type-preserving isomorphism of depth-d filters, or None.

    With ``lam=None`` the base colors stand in for labels.
    """
    g1 = _labeled_filter(frag, lam, v1, d)
    g2 = _labeled_filter(frag, lam, v2, d)
    return _iso.find_isomorphism(g1, g2)


# ---------------------------------------------------------------- obstruction

@dataclass
class Witness:
    k: int
    m: int
    n: int
    index: int
    vertex: str
    edges: tuple
    labels: tuple
    words: tuple
    tip_lengths: tuple

    def to_dict(self):
        return {"k": self.k, "m": self.m, "n": self.n, "index": self.index,
                "vertex": self.vertex, "edges": list(self.edges), "labels": list(self.labels),
                "words": list(self.words), "tip_lengths": list(self.tip_lengths)}


def regular_obstruction_witness(quad, lam, k, m, n):
    """Where a label-preserving filter map from row k to row m must break.

    ``quad`` supplies ``frag``, ``z(row, i)``, ``u(row, i)``, ``stub(row, i,
    color)`` and ``word_from_tips(row, n)``. Rows are read off the tip
    lengths inside the fragment. At the first column i where the words
    differ, a filter isomorphism would carry the edge from z(k, i) to u(k, i)
    onto an edge leaving z(m, i) towards a 1-vertex of the other color; that
    edge and the edge to u(m, i) would then share a label.
    """
    frag = quad.frag
    wk = quad.word_from_tips(k, n)
    wm = quad.word_from_tips(m, n)
    if wk == wm:
        raise WordsEqual(f"rows {k} and {m} read the same word {''.join(wk)}")
    i = next(j for j in range(n) if wk[j] != wm[j])
    z_m = quad.z(m, i)
    e_k = quad.edge(quad.z(k, i), quad.u(k, i))
    e_m = quad.edge(z_m, quad.u(m, i))
    e_s = quad.stub(m, i, wk[i])
    la, lb, lk = (lam.edge_label(frag, e_m), lam.edge_label(frag, e_s),
                  lam.edge_label(frag, e_k))
    if la == lb:
        raise NotNice(f"{z_m} already has two outgoing edges labelled {la}")
    if lk != la:
        raise NotNice(f"parallel edges {e_k} and {e_m} carry different labels")
    return Witness(k, m, n, i, z_m, (e_m, e_s), (la, lb), ("".join(wk), "".join(wm)),
                   (quad.tip_length(k, i), quad.tip_length(m, i)))
