"""Command-line entry point: ``treeverse <subcommand> ...``.

Exit codes: 0 success, 1 a verification found a counterexample, 2 invalid
input or violated precondition.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional

from . import embedder, graph_gen, ks_trees, oracle, treewidth
from .tree_core import StructureError, perfect_binary_tree, tree_from_dict

DEFAULT_SEED = 20240601


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# build


def _build_graph(family: str, k: int, h: Optional[int]):
    if k < 0:
        raise InputError("--k must be non-negative")
    if family == "tk":
        h = 2 if h is None else h
        T = ks_trees.build_Tk(k).tree
        G = graph_gen.generate(T, h)
        G.name = f"G^{h}_T{k}"
    elif family == "bk":
        h = 0 if h is None else h
        if k > 2 * ks_trees.max_k_budget() + 1:
            raise InputError(f"--k {k} exceeds the size cap")
        G = graph_gen.generate(perfect_binary_tree(k), h)
        G.name = f"G^{h}_B{k}"
    else:
        if k > 2 * ks_trees.max_k_budget() + 1:
            raise InputError(f"--k {k} exceeds the size cap")
        G = graph_gen.generate_legacy(k)
    return G


def _graph_json(G, family: str, k: int) -> dict:
    return {"name": G.name, "family": family, "k": k, "h": G.h, "n": G.n,
            "tree": G.base_tree.to_dict(), "edges": [list(e) for e in G.edges()]}


def cmd_build(args) -> int:
    G = _build_graph(args.family, args.k, args.h)
    stats = ks_trees.graph_stats(G, args.k)
    stats["family"] = args.family
    stats["h"] = G.h
    # the 18n arc bound concerns the rule arcs without G4
    arcs0 = G.num_arcs if not G.h else graph_gen.generate(G.base_tree, 0).num_arcs
    stats["arcs_h0"] = arcs0
    stats["arcs_bound_holds"] = ks_trees.bound_holds(arcs0, G.n, 18)
    if args.format == "json":
        text = _dump(_graph_json(G, args.family, args.k))
    elif args.format == "edgelist":
        text = graph_gen.edgelist_text(G)
    else:
        text = graph_gen.dot_text(G, name=args.family + str(args.k))
    _write(args.out, text)
    stats_text = _dump(stats)
    if args.stats:
        _write(args.stats, stats_text)
    elif args.out:
        sys.stdout.write(stats_text)
    else:
        sys.stderr.write(stats_text)
    return 0


# ---------------------------------------------------------------------------
# embed


def _load_host(path: str):
    d = _load_json(path)
    tree_d = d.get("tree", d) if isinstance(d, dict) else None
    if not isinstance(tree_d, dict) or "parents" not in tree_d:
        raise InputError("host file carries no base tree (build it with `treeverse build --format json`)")
    h = d.get("h", 2)
    if h != 2:
        raise InputError(f"the embedder needs an h=2 host, file has h={h}")
    T = tree_from_dict(tree_d)
    return graph_gen.generate(T, 2)


def _load_guest(path: str):
    d = _load_json(path)
    if not isinstance(d, dict) or "n" not in d:
        raise InputError("guest must be a JSON object with 'n' and 'parents' or 'edges'")
    n = int(d["n"])
    if "parents" in d:
        return tree_from_dict(d)
    edges = [(int(a), int(b)) for a, b in d.get("edges", [])]
    for a, b in edges:
        if not (0 <= a < n and 0 <= b < n):
            raise InputError(f"edge {a}-{b} refers to a missing vertex")
    return (n, edges)


def cmd_embed(args) -> int:
    G = _load_host(args.host)
    guest = _load_guest(args.guest)
    if args.trace:
        e, tr = embedder.embed_with_trace(G, guest, args.x1, args.x2)
    else:
        e, tr = embedder.embed(G, guest, args.x1, args.x2), None
    problems = embedder.validate_embedding(G, guest, e)
    out = e.to_dict()
    out["valid"] = not problems
    out["problems"] = problems
    if tr is not None:
        out["taux"] = tr.to_dict()
        out["trace_problems"] = embedder.check_trace(G, embedder.guest_adjacency(guest), e.mapping, tr)
    _write(args.out, _dump(out))
    return 0 if not problems else 1


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    if args.interval:
        if args.family == "legacy":
            G = graph_gen.generate_legacy(args.k if args.k is not None else 3)
        else:
            k = args.k if args.k is not None else 3
            if k < 0:
                raise InputError("--k must be non-negative")
            G = graph_gen.generate(ks_trees.build_Tk(k).tree, 2)
        if not 1 <= args.max_m <= oracle.ENUMERATION_CAP:
            raise InputError(f"--max-m must lie in [1, {oracle.ENUMERATION_CAP}]")
        rep = oracle.verify_interval_universal(G, args.max_m)
        rep["graph"] = G.name
    else:
        if args.n is None or not 1 <= args.n <= oracle.ENUMERATION_CAP:
            raise InputError(f"--n must lie in [1, {oracle.ENUMERATION_CAP}]")
        G = ks_trees.prefix_universal_graph(args.n)
        rep = oracle.verify_universal(G, args.n)
        rep["graph"] = G.name
    _write(args.out, _dump(rep))
    return 0 if rep["ok"] else 1


# ---------------------------------------------------------------------------
# treewidth


def cmd_tw_build(args) -> int:
    Gp = treewidth.build_universal_tw(args.n, args.k)
    stats = Gp.stats()
    stats["base"] = Gp.base.name
    _write(args.out, _dump(stats))
    return 0


def cmd_tw_gen(args) -> int:
    H, W = treewidth.gen_partial_ktree(args.n, args.k, args.seed, args.keep)
    out = {"n": len(H), "edges": [list(e) for e in treewidth.graph_edges(H)],
           "decomposition": W.to_dict(), "k": args.k, "seed": args.seed}
    _write(args.out, _dump(out))
    return 0


def cmd_tw_embed(args) -> int:
    d = _load_json(args.graph)
    if not isinstance(d, dict) or "n" not in d:
        raise InputError("graph must be a JSON object with 'n' and 'edges'")
    n = int(d["n"])
    H = treewidth.graph_from_edges(range(n), [tuple(e) for e in d.get("edges", [])])
    if set(H) != set(range(n)):
        raise InputError("edges refer to vertices outside 0..n-1")
    if "decomposition" in d:
        W = treewidth.TreeDecomposition.from_dict(d["decomposition"])
        source = "supplied"
    else:
        W = treewidth.min_degree_decomposition(H)
        source = "min-degree heuristic"
    D = treewidth.normalize_decomposition(H, W, args.k)
    Gp = treewidth.build_universal_tw(n, args.k)
    pi = treewidth.embed_tw(H, D, Gp)
    problems = treewidth.validate_tw_embedding(H, Gp, pi)
    out = {"map": [pi[v] for v in range(n)], "valid": not problems, "problems": problems,
           "witness": source, "normalized": D.to_dict(), "host": Gp.stats()}
    if "seed" in d:
        out["seed"] = d["seed"]
    _write(args.out, _dump(out))
    return 0 if not problems else 1


# ---------------------------------------------------------------------------
# bench


def bench_rows(k_min: int, k_max: int) -> list[dict]:
    """Edge counts of G²_{T_k} against the corrected binary construction at equal n."""
    rows = []
    for k in range(k_min, k_max + 1):
        T = ks_trees.build_Tk(k).tree
        n = T.n
        new = graph_gen.generate(T, 2).num_edges
        j = 0
        while 2 ** (j + 1) - 1 < n:
            j += 1
        B = perfect_binary_tree(j)
        base = B.prefix(n) if n < B.n else B
        old = graph_gen.generate(base, 0).num_edges
        rows.append({"n": n, "edges_legacy_fixed": old, "edges_new": new,
                     "ratio": f"{new / old:.6f}"})
    return rows


def cmd_bench(args) -> int:
    if not 0 <= args.k_min <= args.k_max:
        raise InputError("need 0 <= --k-min <= --k-max")
    rows = bench_rows(args.k_min, args.k_max)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["n", "edges_legacy_fixed", "edges_new", "ratio"],
                       lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _write(args.out, buf.getvalue())
    return 0


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treeverse", description="Sparse universal graphs for trees and bounded-treewidth graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="generate a host graph")
    b.add_argument("--family", choices=["tk", "bk", "legacy"], required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--h", type=int, default=None, help="ancestor depth for rule G4 (tk: 2, bk: 0)")
    b.add_argument("--format", choices=["json", "edgelist", "dot"], default="edgelist")
    b.add_argument("--out", default=None)
    b.add_argument("--stats", default=None, help="write the stats record here")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("embed", help="embed a guest forest into a host")
    e.add_argument("--host", required=True)
    e.add_argument("--guest", required=True)
    e.add_argument("--x1", type=int, default=None)
    e.add_argument("--x2", type=int, default=None)
    e.add_argument("--trace", action="store_true")
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_embed)

    v = sub.add_parser("verify", help="exhaustive universality checks")
    v.add_argument("--n", type=int, default=None)
    v.add_argument("--interval", action="store_true")
    v.add_argument("--max-m", type=int, default=7)
    v.add_argument("--family", choices=["tk", "legacy"], default="tk")
    v.add_argument("--k", type=int, default=None)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    tb = sub.add_parser("tw-build", help="blow-up host for treewidth-k graphs")
    tb.add_argument("--n", type=int, required=True)
    tb.add_argument("--k", type=int, required=True)
    tb.add_argument("--out", default=None)
    tb.set_defaults(func=cmd_tw_build)

    tg = sub.add_parser("tw-gen", help="random partial k-tree with its decomposition")
    tg.add_argument("--n", type=int, required=True)
    tg.add_argument("--k", type=int, required=True)
    tg.add_argument("--seed", type=int, default=DEFAULT_SEED)
    tg.add_argument("--keep", type=float, default=0.8)
    tg.add_argument("--out", default=None)
    tg.set_defaults(func=cmd_tw_gen)

    te = sub.add_parser("tw-embed", help="embed a treewidth-k graph into the blow-up host")
    te.add_argument("--graph", required=True)
    te.add_argument("--k", type=int, required=True)
    te.add_argument("--out", default=None)
    te.set_defaults(func=cmd_tw_embed)

    be = sub.add_parser("bench", help="edge counts of the two constructions as CSV")
    be.add_argument("--k-min", type=int, default=2)
    be.add_argument("--k-max", type=int, default=8)
    be.add_argument("--out", default=None)
    be.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, StructureError, embedder.PreconditionError, ks_trees.BudgetError,
            oracle.CapExceeded, ValueError, KeyError) as exc:
        sys.stderr.write(f"treeverse: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
