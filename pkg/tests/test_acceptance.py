"""One test per acceptance criterion. Each prints a PASS/FAIL line with its
measurements and wall time; the lines are repeated in the pytest summary.

Run directly (python tests/test_acceptance.py) for the lines alone.
"""

import time

import pytest

from npcevents import cover, labeling, median_events as me, special, tiles, wise
from npcevents.complex_core import (bundled, check_admissible_orientation, check_csc, check_npc,
                                    check_vh)

RESULTS = []
LABELINGS_PER_ALPHABET = 8


def record(number, title, ok, seconds, limit, detail):
    ok = bool(ok) and seconds < limit
    line = (f"{'PASS' if ok else 'FAIL'} criterion {number:>2} {title}: {detail} "
            f"[{seconds:.2f}s < {limit}s]")
    RESULTS.append(line)
    print(line)
    assert ok, line


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def tree_product_count(r, h_gens=2, v_gens=3):
    def sphere(gens, i):
        return 1 if i == 0 else 2 * gens * (2 * gens - 1) ** (i - 1)
    return sum(sphere(h_gens, i) * sphere(v_gens, j) for i in range(r + 1) for j in range(r + 1 - i))


def test_criterion_01_structure_counts():
    with Timer() as t:
        X, W = wise.build_X(), wise.build_W()
    ok = X.counts() == (1, 5, 6) and W.counts() == (27, 49, 24)
    record(1, "structure counts", ok, t.seconds, 1, f"X={X.counts()} W={W.counts()}")


def test_criterion_02_local_checks():
    with Timer() as t:
        X = bundled("wise_x")
        xs = [f(X).ok for f in (check_vh, check_csc, check_npc, check_admissible_orientation)]
        mob = check_admissible_orientation(bundled("mobius")).ok
        kinds = {name: special.detect_pathologies(bundled(name)).kinds() - {"d"}
                 for name in ("self_intersect", "direct_osculation", "inter_osculation")}
    ok = all(xs) and not mob and kinds == {"self_intersect": {"a"}, "direct_osculation": {"c"},
                                           "inter_osculation": {"e"}}
    detail = (f"wise_x vh/csc/npc/orientation={xs} mobius orientation={'PASS' if mob else 'FAIL'} "
              f"pathologies={ {k: sorted(v) for k, v in kinds.items()} }")
    record(2, "local checks", ok, t.seconds, 1, detail)


def test_criterion_03_unfolder_oracle():
    X = bundled("wise_x")
    with Timer() as t:
        iso, counts = [], []
        for r in (1, 2, 3, 4):
            b = cover.unfold_ball(X, "v", r)
            p = cover.unfold_csc_product(X, "v", r)
            iso.append(cover.isomorphism_over_base(b, p) is not None)
            counts.append(b.counts()[0])
    expect = [tree_product_count(r) for r in (1, 2, 3, 4)]
    ok = all(iso) and counts == expect and counts[:2] == [11, 77]
    record(3, "unfolder = product of trees", ok, t.seconds, 30,
           f"isomorphic={iso} vertices={counts} formula={expect}")


def test_criterion_04_period_doubling():
    with Timer() as t:
        pd = wise.period_doubling_check(12)
    T = wise.wise_tileset()
    muts = wise.mutations(T, "side") + wise.mutations(T, "swap")
    kept = [(d, M) for d, M in muts if tiles.check_4way_deterministic(M).ok]
    fails = {d: wise.first_failure(M, 4) for d, M in kept}
    survivors = [d for d, f in fails.items() if f is None]
    ok = pd.ok and kept and not survivors
    worst = max(f for f in fails.values() if isinstance(f, int))
    record(4, "period doubling", ok, t.seconds, 10,
           f"n<=12 {pd.status}; {len(kept)} deterministic single-square mutations all fail by n={worst}")


def test_criterion_05_census():
    with Timer() as t:
        wb = cover.unfold_filter(wise.build_W(), "v", 7)
        wc = cover.filter_type_census(wb, 2)
        xb = cover.unfold_filter(bundled("wise_x"), "v", 5)
        xc = cover.filter_type_census(xb, 2, colored=False, typed=False)
    ok = wc.count <= 27 and xc.count == 1
    record(5, "filter-type census", ok, t.seconds, 60,
           f"W~ depth 2: {wc.count} classes over {wc.eligible} vertices (<= 27); "
           f"uncolored X~: {xc.count} class")


def test_criterion_06_degrees_and_natural():
    with Timer() as t:
        W = wise.build_W()
        b = cover.unfold_filter(W, "v", 7)
        prof = wise.degree_profile(b)
        ef = me.events_from_filter(me.fragment_from_ball(b), s=6)
        q, _ = me.natural_clique_max(ef)
        qp, _ = me.natural_clique_max(ef, prune_tips=True)
    ok = (prof.get(0) == [5] and set(prof.get(1, [])) <= {4, 5} and prof.get(2) == [2]
          and set(prof.get(3, [])) <= {0, 1} and q <= 11 and q == qp)
    record(6, "degree profile and natural clique", ok, t.seconds, 60,
           f"out-degrees={prof} natural clique max={q} (pruned {qp}, bound 11, {ef.n} events)")


def test_criterion_07_obstruction_suite():
    with Timer() as t:
        q = wise.QuadrantFragment(3, 7)
        found = {k: list(labeling.iter_nice(q.frag, k, limit=LABELINGS_PER_ALPHABET)) for k in range(1, 6)}
        witnesses, isos = 0, []
        for lam in found[5]:
            for m in range(1, 8):
                for k in range(m):
                    w = labeling.regular_obstruction_witness(q, lam, k, m, 3)
                    witnesses += 1
                    isos.append(labeling.labeled_filter_iso(q.frag, lam, q.z(k, 0), q.z(m, 0),
                                                            q.covering_depth(w.index)))
    counts = {k: len(v) for k, v in found.items()}
    ok = (all(counts[k] == 0 for k in range(1, 5)) and counts[5] > 0
          and witnesses == 28 * counts[5] and all(f is None for f in isos))
    record(7, "obstruction suite", ok, t.seconds, 300,
           f"nice labelings per k (capped at {LABELINGS_PER_ALPHABET})={counts}; "
           f"{witnesses} witnesses; labeled filter isomorphisms found={sum(f is not None for f in isos)}")


def test_criterion_08_special_trace_bridge():
    expect = {"torus": [], "rose": [], "single_square": [],
              "self_intersect": ["LES3"], "direct_osculation": ["LES1"],
              "inter_osculation": ["LES2"], "wise_x": ["LES1"]}
    got, matched = {}, []
    with Timer() as t:
        for name in expect:
            c = bundled(name)
            rep = special.detect_pathologies(c)
            v = labeling.hyperplane_trace_check(c, radius=4)
            got[name] = v.info["violated"]
            want = sorted(labeling.PATHOLOGY_AXIOM[k] for k in rep.kinds() - {"d"})
            matched.append(got[name] == want)
        mobius_blocked = not check_admissible_orientation(bundled("mobius")).ok
    ok = got == expect and all(matched) and mobius_blocked
    record(8, "special <-> trace bridge", ok, t.seconds, 60,
           f"violations={got}; mobius stopped by orientation={mobius_blocked}")


def median_fragments():
    out = {"grid 4x4": me.grid_fragment(4), "tree 2^4": me.tree_fragment(2, 4),
           "single square": me.from_complex(bundled("single_square"), "p")}
    for name in ("torus", "rose", "single_square", "self_intersect", "direct_osculation",
                 "inter_osculation", "wise_x"):
        c = bundled(name)
        out[f"{name} filter"] = me.fragment_from_ball(cover.unfold_filter(c, c.vertices[0], 6))
    out["W filter"] = me.fragment_from_ball(cover.unfold_filter(wise.build_W(), "v", 6))
    out["mobius ball"] = me.fragment_from_ball(cover.unfold_ball(bundled("mobius"), "b0", 4))
    return out


def test_criterion_09_median_suite():
    bad = []
    with Timer() as t:
        frags = median_fragments()
        for name, f in frags.items():
            checks = [me.median_check(f), me.check_three_cube(f), me.theta_consistency(f)]
            orient = me.class_orientation(f)
            if name == "mobius ball":
                # no admissible orientation (criterion 2): the lifted classes must disagree
                if orient.ok:
                    bad.append("mobius ball:orientation unexpectedly consistent")
            else:
                checks.append(orient)
            if f.is_filter or f.closed:
                for v in sorted(f.resolved, key=lambda x: f.index[x])[:6]:
                    checks.append(me.order_agreement_check(f, v))
            if f.is_filter and (f.closed or (f.bound or 0) >= 5):
                ef = me.events_from_filter(f, s=5)
                checks += [me.event_axioms(ef), me.relation_cross_check(ef), me.domain_roundtrip(ef, 5)]
            bad += [f"{name}:{c.check}" for c in checks if not c.ok]
    record(9, "median property suite", not bad, t.seconds, 120,
           f"{len(frags)} fragments; failures={bad or 'none'}")


def test_criterion_10_tiles():
    T = wise.wise_tileset()
    with Timer() as t:
        det = tiles.check_4way_deterministic(T).ok
        patches = [tiles.tile_patch(T, n, n) for n in range(1, 11)]
        patch_ok = all(p is not None and tiles.verify_tiling(T, p) for p in patches)
        b = cover.unfold_filter(wise.build_X(T), "v", 8)
        grid = wise.lift_tiling(T, patches[3], b)
    ok = det and patch_ok and grid is not None and len(grid) == 25
    record(10, "tiles suite", ok, t.seconds, 120,
           f"4-way={det} patches 1..10={patch_ok} 4x4 patch -> flat grid of "
           f"{len(grid) if grid else 0} vertices")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
