"""Exact isomorphism of rooted directed graphs (truncated filters).

A rooted graph is given as ``(root, vattr, out)`` where ``vattr`` maps each
vertex to a hashable attribute and ``out`` maps each vertex to a list of
``(edge_attr, child)`` pairs. Every vertex must be reachable from the root.
"""

from collections import defaultdict, deque


def truncated_filter(root, out_of, depth, vattr_of, eattr_of=lambda e: None):
    """Collect the directed ball of ``depth`` steps below ``root``.

    ``out_of(u)`` yields ``(edge, child)``; returns (vattr, out, level).
    """
    level = {root: 0}
    order = [root]
    q = deque([root])
    while q:
        u = q.popleft()
        if level[u] == depth:
            continue
        for e, w in out_of(u):
            if w not in level:
                level[w] = level[u] + 1
                order.append(w)
                q.append(w)
    out = {u: [] for u in order}
    for u in order:
        if level[u] == depth:
            continue
        for e, w in out_of(u):
            if w in level and level[w] <= depth:
                out[u].append((eattr_of(e), w))
    vattr = {u: vattr_of(u) for u in order}
    return vattr, out, level


def signatures(root, vattr, out, rounds=None):
    """Colour refinement on in- and out-neighbourhoods; returns vertex -> int."""
    inn = defaultdict(list)
    for u, lst in out.items():
        for a, w in lst:
            inn[w].append((a, u))
    col = {u: hash((vattr[u], u == root)) for u in out}
    n = len(out)
    for _ in range(rounds if rounds is not None else n):
        new = {}
        for u in out:
            o = tuple(sorted((hash(a), col[w]) for a, w in out[u]))
            i = tuple(sorted((hash(a), col[w]) for a, w in inn[u]))
            new[u] = hash((col[u], o, i))
        if len(set(new.values())) == len(set(col.values())):
            col = new
            break
        col = new
    return col


def _canon_counts(sig):
    c = defaultdict(int)
    for v in sig.values():
        c[v] += 1
    return sorted(c.items())


def find_isomorphism(g1, g2, max_nodes=None):
    """Return a root-preserving isomorphism dict or None.

    ``g`` = (root, vattr, out). Exact: refinement only prunes candidates,
    backtracking settles the rest.
    """
    r1, va1, out1 = g1
    r2, va2, out2 = g2
    if len(out1) != len(out2):
        return None
    m1 = sum(len(x) for x in out1.values())
    m2 = sum(len(x) for x in out2.values())
    if m1 != m2 or va1[r1] != va2[r2]:
        return None
    # joint refinement so colours are comparable across graphs
    joint_out = {("1", u): [(a, ("1", w)) for a, w in out1[u]] for u in out1}
    joint_out.update({("2", u): [(a, ("2", w)) for a, w in out2[u]] for u in out2})
    joint_va = {("1", u): (va1[u], u == r1) for u in out1}
    joint_va.update({("2", u): (va2[u], u == r2) for u in out2})
    sig = signatures(None, joint_va, joint_out)
    s1 = {u: sig[("1", u)] for u in out1}
    s2 = {u: sig[("2", u)] for u in out2}
    if _canon_counts(s1) != _canon_counts(s2):
        return None
    inn1, inn2 = defaultdict(list), defaultdict(list)
    for u, lst in out1.items():
        for a, w in lst:
            inn1[w].append((a, u))
    for u, lst in out2.items():
        for a, w in lst:
            inn2[w].append((a, u))
    eset2 = set()
    for u, lst in out2.items():
        for a, w in lst:
            eset2.add((u, a, w))
    # BFS order with a mapped predecessor for every vertex after the root
    order, parent = [r1], {r1: None}
    dq = deque([r1])
    while dq:
        u = dq.popleft()
        for a, w in out1[u]:
            if w not in parent:
                parent[w] = (u, a)
                order.append(w)
                dq.append(w)
    if len(order) != len(out1):
        return None

    f, inv = {r1: r2}, {r2: r1}

    def consistent(x, y):
        n1 = n2 = 0
        for a, w in out1[x]:
            if w in f:
                n1 += 1
                if (y, a, f[w]) not in eset2:
                    return False
        for a, w in inn1[x]:
            if w in f:
                n1 += 1
                if (f[w], a, y) not in eset2:
                    return False
        for a, w in out2[y]:
            n2 += w in inv
        for a, w in inn2[y]:
            n2 += w in inv
        return n1 == n2

    n = len(order)
    if n == 1:
        return dict(f)
    cand = [None] * n
    pos, steps = 1, 0
    while pos > 0:
        if pos == n:
            return dict(f)
        x = order[pos]
        if cand[pos] is None:
            pu, a = parent[x]
            fu = f[pu]
            cand[pos] = iter([y for b, y in out2[fu] if b == a and y not in inv
                              and s2[y] == s1[x] and va2[y] == va1[x]])
        for y in cand[pos]:
            steps += 1
            if max_nodes is not None and steps > max_nodes:
                raise RuntimeError("isomorphism search exceeded its node budget")
            if consistent(x, y):
                f[x] = y
                inv[y] = x
                pos += 1
                if pos < n:
                    cand[pos] = None
                break
        else:
            cand[pos] = None
            pos -= 1
            if pos > 0:
                del inv[f.pop(order[pos])]
    return None
