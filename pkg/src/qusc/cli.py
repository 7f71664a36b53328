"""Command-line interface: generate, query, verify, embed, bench.

Exit codes: 0 success, 2 input error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .core import COSINE, EUCLIDEAN, YoungDiagram
from .formats import FORMATS, read_scattering, write_scattering
from .scattering import (Scattering, build_scattering, embed_diagram,
                         iota_embed, verify_scattering)
from .search import cosine_nearest, nearest_center

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3


class InputError(Exception):
    pass


def _parse_rows(text: str) -> YoungDiagram:
    try:
        rows = tuple(int(t) for t in text.replace(" ", "").split(",") if t != "")
    except ValueError:
        raise InputError(f"cannot parse row list {text!r}")
    if not rows:
        raise InputError("empty row list")
    try:
        lam = YoungDiagram.from_rows(rows)
    except ValueError as exc:
        raise InputError(str(exc))
    if lam.rank < 2:
        raise InputError(
            f"diagram {lam} is degenerate: rank {lam.rank} scatterings do not grow")
    return lam


def _parse_point(text: str, dim: int) -> tuple[float, ...]:
    text = text.strip()
    try:
        if text.startswith("["):
            vals = json.loads(text)
        else:
            vals = [float(t) for t in text.replace(",", " ").split()]
    except (ValueError, json.JSONDecodeError):
        raise InputError(f"cannot parse query point {text!r}")
    if len(vals) != dim:
        raise InputError(f"query has {len(vals)} coordinates, centers have {dim}")
    return tuple(float(v) for v in vals)


def cmd_generate(args) -> int:
    lam = _parse_rows(args.lam)
    if args.rank is not None and args.rank != lam.rank:
        raise InputError(f"--rank {args.rank} does not match diagram rank {lam.rank}")
    s = build_scattering(lam, args.levels, max_points=args.max_points,
                         whole_orbits=args.whole_orbits)
    try:
        write_scattering(s, args.out, args.format)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}")
    for k, (lo, hi) in enumerate(s.level_blocks()):
        print(f"level {k}: {hi - lo} centers")
    print(f"total: {len(s)} centers -> {args.out} ({args.format})")
    return EXIT_OK


def _spot_check(q, result, s: Scattering, k: int, metric: str) -> bool:
    """Embedded oracle: full scan, tie-normalized index-set comparison."""
    dists = []
    for i, c in enumerate(s.centers):
        vals = c.values()
        if metric == EUCLIDEAN:
            d = math.dist(q, vals)
        else:
            na = math.sqrt(sum(x * x for x in q))
            nb = math.sqrt(sum(y * y for y in vals))
            d = 1.0 - sum(x * y for x, y in zip(q, vals)) / (na * nb)
            d = d if d > 0.0 else 0.0
        dists.append(d)
    order = sorted(range(len(dists)), key=lambda i: dists[i])
    kk = min(k, len(order))
    tau = dists[order[kk - 1]]
    tol = 1e-9 * (1.0 + abs(tau))
    got = set(result.indices)
    if len(got) != kk:
        return False
    if any(dists[i] > tau + tol for i in got):
        return False
    must = {i for i in order if dists[i] < tau - tol}
    return must <= got


def cmd_query(args) -> int:
    try:
        s = read_scattering(args.centers)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read centers: {exc}")
    if args.point is not None:
        raw_points = [args.point]
    else:
        raw_points = [line for line in sys.stdin if line.strip()]
    queries = [_parse_point(t, s.dim) for t in raw_points]

    def run(q):
        if args.metric == COSINE:
            return cosine_nearest(q, s, args.k)
        return nearest_center(q, s, args.k, args.metric)

    workers = int(os.environ.get("QUSC_THREADS", "1") or "1")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, queries))
    else:
        results = [run(q) for q in queries]

    failed = False
    for q, res in zip(queries, results):
        if args.verify and not _spot_check(q, res, s, args.k, args.metric):
            failed = True
        print(json.dumps({
            "query": list(q),
            "indices": res.indices,
            "distances": res.distances,
            "centers": [{"exact": list(p.exact_strings()),
                         "coords": list(p.values())} for p in res.points],
            "metric": res.metric,
            "candidates_examined": res.candidates_examined,
        }))
    if failed:
        print("self-check against embedded oracle failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        s = read_scattering(args.centers)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read centers: {exc}")
    try:
        rep = verify_scattering(s, prefix_stride=args.stride)
    except ValueError as exc:
        raise InputError(str(exc))
    print(json.dumps({
        "euclidean_exponent": rep.euclidean_exponent,
        "cosine_exponent": rep.cosine_exponent,
        "cosine_exponent_bound": rep.cosine_exponent_bound,
        "shape_ratio": rep.shape_ratio,
        "prefixes": [{
            "length": st.length,
            "min_distance": st.min_distance,
            "max_distance": st.max_distance,
            "min_cosine": st.min_cosine,
            "max_cosine": st.max_cosine,
            "at_level_boundary": st.at_level_boundary,
        } for st in rep.prefixes],
    }))
    if not rep.euclidean_exponent <= 2.0 + 1e-9:
        print(f"euclidean ratio {rep.euclidean_exponent} exceeds 2", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_embed(args) -> int:
    try:
        s = read_scattering(args.centers)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read centers: {exc}")
    target = embed_diagram(s.diagram)
    lifted = [iota_embed(p) for p in s.centers]
    out = Scattering(target, s.levels_built, lifted, s.level_offsets,
                     complete=False)
    try:
        write_scattering(out, args.out, args.format)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}")
    print(f"embedded {len(out)} centers into dimension {out.dim} -> {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    lam = _parse_rows(args.lam)
    try:
        levels = [int(t) for t in args.levels.split(",")]
    except ValueError:
        raise InputError(f"cannot parse levels list {args.levels!r}")
    rng = random.Random(args.seed)
    print("levels,centers,structured_ms,brute_ms,mean_candidates")
    for lv in levels:
        s = build_scattering(lam, lv)
        top = lam.rows[0]
        queries = [[rng.uniform(-0.5, top + 0.5) for _ in range(s.dim)]
                   for _ in range(args.queries)]
        t0 = time.perf_counter()
        candidates = 0
        for q in queries:
            res = nearest_center(q, s, args.k)
            candidates += res.candidates_examined
        structured = (time.perf_counter() - t0) / len(queries)

        flat = [c.values() for c in s.centers]
        t0 = time.perf_counter()
        for q in queries:
            best = None
            for i, vals in enumerate(flat):
                acc = 0.0
                for x, y in zip(q, vals):
                    dd = x - y
                    acc += dd * dd
                if best is None or acc < best[0]:
                    best = (acc, i)
        brute = (time.perf_counter() - t0) / len(queries)
        print(f"{lv},{len(s)},{structured * 1e3:.4f},{brute * 1e3:.4f},"
              f"{candidates / len(queries):.1f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qusc",
                                 description="quasi-uniform scatterings on "
                                             "weight polytope boundaries")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a center sequence and write it")
    g.add_argument("--lambda", dest="lam", required=True,
                   help="comma-separated diagram rows, e.g. 2,1,1")
    g.add_argument("--rank", type=int, default=None,
                   help="optional cross-check: rank of the root system")
    g.add_argument("--levels", type=int, default=0)
    g.add_argument("--max-points", type=int, default=None)
    g.add_argument("--whole-orbits", action="store_true",
                   help="retreat the cut to a whole-orbit prefix")
    g.add_argument("--format", choices=FORMATS, default="binary")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    q = sub.add_parser("query", help="nearest-center queries against a file")
    q.add_argument("--centers", required=True)
    q.add_argument("--point", default=None,
                   help="one query; omit to stream queries from stdin")
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--metric", choices=(EUCLIDEAN, COSINE), default=EUCLIDEAN)
    q.add_argument("--verify", action="store_true",
                   help="cross-check each result against a full scan")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="quasi-uniformity report for a file")
    v.add_argument("--centers", required=True)
    v.add_argument("--stride", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("embed", help="append a unit coordinate to every center")
    e.add_argument("--centers", required=True)
    e.add_argument("--format", choices=FORMATS, default="binary")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_embed)

    b = sub.add_parser("bench", help="structured vs brute-force query timing")
    b.add_argument("--lambda", dest="lam", required=True)
    b.add_argument("--levels", required=True, help="comma-separated level counts")
    b.add_argument("--queries", type=int, default=200)
    b.add_argument("--k", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
