"""Hyperplanes of finite square complexes and the pathologies that stop a
complex from being special.

Pathologies are keyed by letter:

a  a square with two consecutive sides dual to one hyperplane
b  a one-sided hyperplane
c  direct self-osculation
d  indirect self-osculation (reported, harmless)
e  two hyperplanes that cross somewhere and osculate somewhere else
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .complex_core import Verdict, parallelism


@dataclass(frozen=True)
class BaseHyperplane:
    id: str
    edges: tuple
    two_sided: bool
    flip: dict = field(default_factory=dict, compare=False, hash=False)

    def to_dict(self):
        return {"id": self.id, "edges": list(self.edges), "two_sided": self.two_sided,
                "flip": {e: self.flip[e] for e in self.edges} if self.two_sided else None}


def base_hyperplanes(c):
    classes, flip, conflicts = parallelism(c)
    groups = {}
    for e in sorted(classes):
        groups.setdefault(classes[e], []).append(e)
    bad = set(conflicts)
    return [BaseHyperplane(f"H:{rep}", tuple(ms), rep not in bad, {e: flip[e] for e in ms})
            for rep, ms in sorted(groups.items())]


def hyperplane_of(c):
    """edge -> hyperplane id."""
    return {e: h.id for h in base_hyperplanes(c) for e in h.edges}


def intersecting_pairs(c):
    """Unordered pairs of distinct hyperplanes crossing in some square."""
    hyp = hyperplane_of(c)
    out = set()
    for q in c.squares:
        a, b = hyp[q[0][0]], hyp[q[1][0]]
        if a != b:
            out.add(frozenset((a, b)))
    return out


@dataclass
class PathologyReport:
    a: list
    b: list
    c: list
    d: list
    e: list

    @property
    def special(self):
        return not (self.a or self.b or self.c or self.e)

    def kinds(self):
        return {k for k in "abcde" if getattr(self, k)}

    def to_dict(self):
        return {k: getattr(self, k) for k in "abcde"}


def detect_pathologies(c):
    hps = base_hyperplanes(c)
    hyp = {e: h.id for h in hps for e in h.edges}
    two = {h.id: h.two_sided for h in hps}
    flip = {e: h.flip[e] for h in hps for e in h.edges}

    a_list = []
    for k, q in enumerate(c.squares):
        for i in range(4):
            e1, e2 = q[i - 1][0], q[i][0]
            if hyp[e1] == hyp[e2]:
                a_list.append({"square": k, "sides": [e1, e2], "hyperplane": hyp[e1]})
                break

    b_list = [{"hyperplane": h.id, "edges": list(h.edges)} for h in hps if not h.two_sided]

    crossing = intersecting_pairs(c)
    c_list, d_list, e_list = [], [], []
    seen_e = set()
    for v in sorted(c.vertices):
        ends = c.ends[v]
        corner = {frozenset((x, y)) for _, _, x, y in c.corners[v]}
        for x, y in itertools.combinations(ends, 2):
            if frozenset((x, y)) in corner:
                continue
            hx, hy = hyp[x[0]], hyp[y[0]]
            if hx == hy:
                if not two[hx]:
                    # no transverse direction to compare; counted under (b)
                    continue
                # source relative to the hyperplane's propagated direction
                sx = (x[1] == "s") ^ bool(flip[x[0]])
                sy = (y[1] == "s") ^ bool(flip[y[0]])
                w = {"vertex": v, "ends": [list(x), list(y)], "hyperplane": hx}
                (c_list if sx == sy else d_list).append(w)
            elif frozenset((hx, hy)) in crossing:
                key = (v, frozenset((hx, hy)))
                if key in seen_e:
                    continue
                seen_e.add(key)
                e_list.append({"vertex": v, "ends": [list(x), list(y)],
                               "hyperplanes": sorted([hx, hy])})
    return PathologyReport(a_list, b_list, c_list, d_list, e_list)


def check_special(c):
    rep = detect_pathologies(c)
    if rep.special:
        return Verdict(True, "special", None, {"indirect": len(rep.d)})
    first = next(k for k in "abce" if getattr(rep, k))
    return Verdict(False, "special", {"pathology": first, "witness": getattr(rep, first)[0]},
                   {"kinds": sorted(rep.kinds())})
