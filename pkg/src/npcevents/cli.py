"""Command-line front end.

Exit codes: 0 success or PASS, 1 FAIL or UNSAT (a report is still printed),
2 usage, input or resource errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import complex_core as cc
from . import cover, labeling, median_events, special, tiles, wise
from .errors import NpcError

FORMATS = ("text", "json", "dot")


class UsageError(Exception):
    pass


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=str)


def _read_json(path):
    p = cc.resolve_path(path)
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not JSON ({exc})") from exc


def _fragment(path):
    """A domain fragment from a fragment or ball JSON file."""
    d = _read_json(path)
    if "base" in d:
        return median_events.fragment_from_ball(cover.CoverBall.from_dict(d))
    return median_events.DomainFragment.from_dict(d)


def _budget(args):
    env = os.environ.get("WISE_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"WISE_BUDGET must be an integer, got {env!r}") from exc
    return args.budget


def _positive(name, value, zero=False):
    if value is None:
        return
    if value < 0 or (value == 0 and not zero):
        raise UsageError(f"--{name} must be {'nonnegative' if zero else 'positive'}")


def _verdict_out(args, v, extra=None):
    if args.format == "json":
        d = v.to_dict()
        if extra:
            d.update(extra)
        print(_dump(d))
    else:
        print(v.text())
    return 0 if v.ok else 1


# ---------------------------------------------------------------- commands

def cmd_check(args):
    c = cc.load_complex(args.file)
    if args.what == "special":
        rep = special.detect_pathologies(c)
        v = special.check_special(c)
        if args.format == "json":
            print(_dump({**v.to_dict(), "pathologies": rep.to_dict()}))
        else:
            print(v.text())
            for k in "abcde":
                print(f"  ({k}) {len(getattr(rep, k))}")
        return 0 if v.ok else 1
    fn = {"npc": cc.check_npc, "vh": cc.check_vh, "csc": cc.check_csc,
          "orientation": cc.check_admissible_orientation}[args.what]
    return _verdict_out(args, fn(c))


def cmd_unfold(args):
    _positive("radius", args.radius, zero=True)
    c = cc.load_complex(args.file)
    if args.csc_fast:
        ball = cover.unfold_csc_product(c, args.vertex, args.radius)
    elif args.directed:
        ball = cover.unfold_filter(c, args.vertex, args.radius, budget=_budget(args))
    else:
        ball = cover.unfold_ball(c, args.vertex, args.radius, budget=_budget(args))
    if args.out:
        Path(args.out).write_text(ball.to_json())
    if args.format == "json":
        print(ball.to_json())
    elif args.format == "dot":
        sys.stdout.write(ball.to_dot())
    else:
        n, e, q = ball.counts()
        print(f"ball of {c.name} at {args.vertex}, radius {args.radius}: "
              f"{n} vertices, {e} edges, {q} squares, "
              f"{sum(ball.interior.values())} interior")
    return 0


def cmd_filter(args):
    d = _read_json(args.ball)
    ball = cover.CoverBall.from_dict(d)
    frag = median_events.principal_filter(ball, args.vertex, args.depth)
    if args.out:
        Path(args.out).write_text(json.dumps(frag.to_dict(), sort_keys=True))
    if args.format == "json":
        print(json.dumps(frag.to_dict(), sort_keys=True))
    else:
        s = median_events.fragment_summary(frag)
        print(f"filter of {args.vertex}: depth {s['bound']}, "
              f"{s['counts'][0]} vertices, {s['counts'][1]} edges, {s['counts'][2]} squares, "
              f"{s['classes']} classes")
    return 0


def cmd_events(args):
    _positive("config-bound", args.config_bound)
    frag = _fragment(args.frag)
    ef = median_events.events_from_filter(frag, s=args.config_bound)
    ax = median_events.event_axioms(ef)
    extra = {}
    if args.natural:
        q, clique = median_events.natural_clique_max(ef)
        extra = {"natural_clique_max": q, "clique": list(clique)}
    if args.format == "json":
        print(_dump({**ef.to_dict(), "axioms": ax.to_dict(), **extra}))
    elif args.format == "dot":
        sys.stdout.write(ef.natural_dot())
    else:
        print(f"{ef.n} events, {len(ef.covers)} immediate causalities, "
              f"{int(ef.mu.sum()) // 2} minimal conflicts, {int(ef.concurrent.sum()) // 2} concurrent pairs")
        print(ax.text())
        if args.natural:
            print(f"natural clique max: {extra['natural_clique_max']}")
    return 0 if ax.ok else 1


def cmd_label(args):
    if args.action == "search":
        _positive("alphabet", args.alphabet)
        frag = _fragment(args.target)
        lam = labeling.search_nice(frag, args.alphabet)
        if lam is None:
            print(_dump({"alphabet": args.alphabet, "result": "NONE"}) if args.format == "json"
                  else f"no nice labeling with {args.alphabet} symbols")
            return 1
        if args.out:
            Path(args.out).write_text(lam.to_json())
        print(_dump(lam.to_dict()) if args.format == "json"
              else f"nice labeling with {args.alphabet} symbols on {len(lam.by_class)} classes")
        return 0
    if args.action == "check":
        if not args.labeling:
            raise UsageError("label check needs --labeling FILE")
        frag = _fragment(args.target)
        lam = labeling.EdgeLabeling.from_dict(_read_json(args.labeling))
        return _verdict_out(args, labeling.check_nice(lam, frag))
    # trace: canonical hyperplane labeling (or a given one) on a cover filter
    _positive("radius", args.radius, zero=True)
    c = cc.load_complex(args.target)
    if not args.labeling:
        v = labeling.hyperplane_trace_check(c, args.vertex, args.radius, args.config_bound, _budget(args))
        return _verdict_out(args, v)
    ball = cover.unfold_filter(c, args.vertex or c.vertices[0], args.radius, budget=_budget(args))
    ef = median_events.events_from_filter(median_events.fragment_from_ball(ball), s=args.config_bound)
    lam = labeling.EdgeLabeling.from_dict(_read_json(args.labeling))
    return _verdict_out(args, labeling.check_trace(lam, ef))


def cmd_tiles(args):
    T = tiles.load_tiles(args.file)
    T.validate()
    if args.action == "check":
        v = tiles.check_4way_deterministic(T)
        return _verdict_out(args, v, {"corner_roles_complete": tiles.corner_roles_complete(T)})
    if args.action in ("patch", "torus"):
        a, b = (args.w, args.h) if args.action == "patch" else (args.a, args.b)
        if a is None or b is None:
            raise UsageError("patch needs --w and --h; torus needs --a and --b")
        _positive("w/a", a)
        _positive("h/b", b)
        t = tiles.tile_patch(T, a, b) if args.action == "patch" else tiles.tile_torus(T, a, b)
        if t is None:
            print(_dump({"result": "UNSAT", "width": a, "height": b}) if args.format == "json" else "UNSAT")
            return 1
        print(_dump(t.to_dict()) if args.format == "json" else t.text(), end="" if args.format != "json" else "\n")
        return 0
    _positive("max-patch", args.max_patch)
    _positive("max-period", args.max_period)
    rep = tiles.aperiodicity_probe(T, args.max_patch, args.max_period)
    if args.format == "json":
        print(_dump(rep.to_dict()))
    else:
        print(f"largest patch: {rep.largest_patch}")
        print(f"tori: {' '.join(f'{a}x{b}' for a, b in rep.tori) or 'none'}")
        print(f"verdict: {rep.verdict}")
    return 0


def cmd_wise(args):
    if args.action in ("build-x", "build-w"):
        c = wise.build_X() if args.action == "build-x" else wise.build_W()
        if args.format == "json":
            print(_dump(cc.complex_to_dict(c)))
        else:
            sys.stdout.write(cc.format_complex(c))
        return 0
    if args.action == "word":
        if len(args.args) != 2:
            raise UsageError("wise word needs N M")
        n, m = args.args
        _positive("N", n, zero=True)
        _positive("M", m, zero=True)
        q = wise.quadrant(n, m)
        if args.format == "json":
            print(_dump({"n": n, "m": m, "word": q.rows[-1], "rows": q.rows, "cells": q.cells}))
        else:
            print(q.rows[-1])
        return 0
    if args.action == "period-doubling":
        if len(args.args) != 1:
            raise UsageError("wise period-doubling needs NMAX")
        _positive("NMAX", args.args[0])
        pd = wise.period_doubling_check(args.args[0])
        if args.format == "json":
            print(_dump(pd.to_dict()))
        else:
            for n, distinct, status in pd.levels:
                print(f"n={n}: {distinct}/{2 ** n} distinct {status}")
        return 0 if pd.ok else 1
    # drive
    _positive("radius", args.radius)
    _positive("depth", args.depth)
    _positive("kmax", args.kmax)
    log = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    rep = wise.counterexample_drive(radius=args.radius, depth=args.depth, k_max=args.kmax,
                                    n=args.n, labeling_limit=args.limit, budget=_budget(args), log=log)
    data = dict(rep.data)
    data.pop("seconds", None)      # keep reports byte-identical across runs
    if args.out:
        Path(args.out).write_text(_dump(data) + "\n")
    if args.format == "json":
        print(_dump(data))
    else:
        print(f"census: {data['census']['classes']} classes (bound {data['census']['bound']})")
        p = data["degree_profile"]
        print(f"out-degrees: 0-vertex {p['zero_vertex']}, 1-vertex {p['one_vertex']}, "
              f"2-vertex {p['two_vertex']}, 3-vertex {p['three_vertex']}")
        print(f"natural clique max: {data['natural_clique_max']} (bound 11)")
        print(f"period doubling to {data['period_doubling']['n_max']}: {data['period_doubling']['status']}")
        for lab in data["labelings"]:
            print(f"k={lab['k']}: {lab['count']} nice labeling(s) examined")
        s = data["obstruction"]
        print(f"obstructions: {s['witness_count']} witnesses, "
              f"{'all filters non-isomorphic' if s['all_none'] else 'SOME FILTERS MATCH'}")
        print("PASS" if data["ok"] else "FAIL")
    return 0 if data["ok"] else 1


# ---------------------------------------------------------------- parser

def build_parser():
    def common_options(parser, top=False):
        # global flags are accepted before or after the subcommand
        parser.add_argument("--format", choices=FORMATS,
                            default="text" if top else argparse.SUPPRESS)
        parser.add_argument("--budget", type=int,
                            default=cover.DEFAULT_BUDGET if top else argparse.SUPPRESS,
                            help="cell budget for cover construction (WISE_BUDGET overrides)")

    p = argparse.ArgumentParser(prog="npcevents",
                                description="Square complexes, covers, event structures and Wise's counterexample.")
    common_options(p, top=True)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="local checks on a complex")
    s.add_argument("what", choices=["npc", "vh", "csc", "orientation", "special"])
    s.add_argument("file")
    common_options(s)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("unfold", help="ball in the universal cover")
    s.add_argument("file")
    s.add_argument("--vertex", required=True)
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--csc-fast", action="store_true", help="use the product-of-trees builder")
    s.add_argument("--directed", action="store_true", help="directed filter instead of a metric ball")
    s.add_argument("--out")
    common_options(s)
    s.set_defaults(func=cmd_unfold)

    s = sub.add_parser("filter", help="principal filter inside a saved ball")
    s.add_argument("ball")
    s.add_argument("--vertex", required=True)
    s.add_argument("--depth", type=int)
    s.add_argument("--out")
    common_options(s)
    s.set_defaults(func=cmd_filter)

    s = sub.add_parser("events", help="event structure of a fragment")
    s.add_argument("frag")
    s.add_argument("--natural", action="store_true")
    s.add_argument("--config-bound", type=int, default=6)
    common_options(s)
    s.set_defaults(func=cmd_events)

    s = sub.add_parser("label", help="nice and trace labelings")
    s.add_argument("action", choices=["search", "check", "trace"])
    s.add_argument("target", help="fragment JSON (search, check) or complex (trace)")
    s.add_argument("--alphabet", type=int, default=5)
    s.add_argument("--labeling")
    s.add_argument("--vertex")
    s.add_argument("--radius", type=int, default=4)
    s.add_argument("--config-bound", type=int, default=6)
    s.add_argument("--out")
    common_options(s)
    s.set_defaults(func=cmd_label)

    s = sub.add_parser("tiles", help="Wang tile sets")
    s.add_argument("action", choices=["check", "patch", "torus", "probe"])
    s.add_argument("file")
    s.add_argument("--w", type=int)
    s.add_argument("--h", type=int)
    s.add_argument("--a", type=int)
    s.add_argument("--b", type=int)
    s.add_argument("--max-patch", type=int, default=10)
    s.add_argument("--max-period", type=int, default=6)
    common_options(s)
    s.set_defaults(func=cmd_tiles)

    s = sub.add_parser("wise", help="Wise's complexes and the counterexample driver")
    s.add_argument("action", choices=["build-x", "build-w", "word", "period-doubling", "drive"])
    s.add_argument("args", nargs="*", type=int)
    s.add_argument("--radius", type=int, default=7)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--kmax", type=int, default=5)
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--limit", type=int, default=2, help="nice labelings examined per alphabet size")
    s.add_argument("--out")
    s.add_argument("--verbose", action="store_true")
    common_options(s)
    s.set_defaults(func=cmd_wise)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc}", file=sys.stderr)
        return 2
    except NpcError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
