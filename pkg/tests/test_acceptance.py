"""End-to-end acceptance checks, one report line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the PASS/FAIL summary is
printed at the end of the session.
"""

from __future__ import annotations

import itertools
import math
import random
from functools import lru_cache

from treeverse import embedder, ks_trees, oracle, splitter, treewidth
from treeverse.graph_gen import generate, generate_legacy, induced_subgraph, verify_merge_embedding
from treeverse.ks_trees import build_Tk, prefix_universal_graph
from treeverse.tree_core import perfect_binary_tree


# 1 -------------------------------------------------------------------------

def test_c1_universal_small_n(report):
    bad = []
    oracle_checks = 0
    counts = oracle.free_tree_counts(10)  # counts[i] is for i+1 vertices
    for n in range(1, 11):
        rep = oracle.verify_universal(prefix_universal_graph(n), n, oracle_max=8)
        oracle_checks += rep["oracle_checks"]
        if not rep["ok"] or rep["classes"] != counts[n - 1]:
            bad.append((n, rep["failures"][:1]))
    ok = not bad and oracle_checks == sum(counts[:8])
    report(1, ok, f"n=1..10 embedded and validated, {oracle_checks} oracle cross-checks")
    assert ok, bad


# 2 -------------------------------------------------------------------------

def test_c2_edge_and_arc_bounds(report):
    bad = []
    for k in range(2, 9):
        T = build_Tk(k).tree
        n = T.n
        e = generate(T, 2).num_edges
        arcs = generate(T, 0).num_arcs
        if not ks_trees.bound_holds(e, n, 600):
            bad.append(("edges", k, e))
        if not ks_trees.bound_holds(arcs, n, 18):
            bad.append(("arcs", k, arcs))
    report(2, not bad, "k=2..8, integer comparison")
    assert not bad


def test_c2_bound_check_is_exact():
    # 14/5 * 2 * log2(2) + 0 = 5.6, so 5 passes and 6 fails
    assert ks_trees.bound_holds(5, 2, 0)
    assert not ks_trees.bound_holds(6, 2, 0)


# 3 -------------------------------------------------------------------------

def test_c3_legacy_counterexample(report):
    G = generate_legacy(3)
    window = range(5, 11)  # x_6..x_11
    S = induced_subgraph(G, window)
    missing = {(a + 1, b + 1) for a, b in itertools.combinations(window, 2) if not G.has_edge(a, b)}
    ok = S.num_edges == 12 and missing == {(6, 11), (7, 11), (8, 11)}
    for ell in (2, 3, 4):
        ok = ok and induced_subgraph(generate_legacy(ell), range(6)).num_edges == 15
    report(3, ok, f"window x6..x11 has {S.num_edges} edges, missing {sorted(missing)}")
    assert ok


# 4 -------------------------------------------------------------------------

def test_c4_ks_and_R_properties(report):
    bad = []
    for k in range(0, 11):
        if not ks_trees.is_ks_tree(build_Tk(k, max_k=10).tree, 4, 1)[0]:
            bad.append(("T", k))
        if not ks_trees.is_ks_tree(perfect_binary_tree(k), 4, 1)[0]:
            bad.append(("B", k))
    for k in range(0, 13):
        rep = ks_trees.check_R_properties(k)
        if not rep["ok"]:
            bad.append(("R", k, rep["failures"]))
        size = ks_trees.tk_size(k)
        # 1/2 + 2^(2k-1) <= |T_k| <= 2^(2k+1) - 1, doubled; stated with the k >= 2 recurrence
        if k >= 2 and not (1 + 2 ** (2 * k) <= 2 * size <= 2 ** (2 * k + 2) - 2):
            bad.append(("window", k, size))
    if ks_trees.tk_size(1) != 2:
        bad.append(("T_1 size", ks_trees.tk_size(1)))
    report(4, not bad, "(4,1) for k<=10, R1-R4 for k<=12, size window for 2<=k<=12")
    assert not bad


# 5 -------------------------------------------------------------------------

def _random_cousin_run(rng: random.Random, T):
    u1 = rng.randrange(1, T.n)
    p1 = int(T.parent[u1])
    us = [u1]
    target = rng.randint(1, 8)
    while len(us) < target:
        r = T.nearest_right_cousin(us[-1])
        if r is None:
            break
        pr = int(T.parent[r])
        if pr != p1 and T.nearest_left_cousin(pr) != p1:
            break
        us.append(r)
    return us


def test_c5_tree_merge(report):
    rng = random.Random(5)
    hosts = {}
    bad = []
    for _ in range(500):
        k, h = rng.randint(1, 6), rng.choice([0, 2])
        T = build_Tk(k).tree
        if (k, h) not in hosts:
            hosts[k, h] = generate(T, h)
        us = _random_cousin_run(rng, T)
        rep = verify_merge_embedding(T, us, h, hosts[k, h])
        ks = ks_trees.is_ks_tree(rep["t_star"], 4, 1)
        if not (rep["ok"] and ks[0]):
            bad.append((k, h, us, rep["violations"][:2], ks))
    report(5, not bad, "500 merges, k<=6, h in {0,2}")
    assert not bad


# 6 -------------------------------------------------------------------------

def _random_forest(rng: random.Random, n: int) -> dict[int, set]:
    adj: dict[int, set] = {v: set() for v in range(n)}
    for v in range(1, n):
        if rng.random() < 0.9:
            p = rng.randrange(v)
            adj[v].add(p)
            adj[p].add(v)
    return adj


def test_c6_splitter_contracts(report):
    rng = random.Random(6)
    bad = []
    kinds: dict[str, int] = {}
    for _ in range(10_000):
        n = rng.randint(2, 60)
        adj = _random_forest(rng, n)
        u = rng.randrange(n)
        cc = splitter.find_components_window(adj, u, rng.randint(1, n - 1))
        bad += splitter.check_collection(adj, cc)
        if n < 3:
            continue
        x = rng.randint(3, n)
        y = rng.randint(max(2, -(-x // 4)), x - 1)  # branch (b) windows need x <= 4y
        cc = splitter.find_feasible_or_critical(adj, u, x, y)
        bad += splitter.check_collection(adj, cc)
        if cc.kind == "critical":
            # total - min <= x-2 agrees with the brute-force proper-subset test
            sizes = [len(c) for c in cc.components]
            worst = max(sum(s) for r in range(1, len(sizes)) for s in itertools.combinations(sizes, r))
            if worst > x - 2:
                bad.append("proper subset exceeds x-2")
            branch = splitter.critical_branch(cc, x, y)
            refs = [splitter.refine_critical(adj, cc, x, y)]
            if branch == "b":
                refs.append(splitter.split_smallest_component(adj, cc, x, y))
            for r in refs:
                bad += splitter.check_refinement(adj, cc, r, x, y)
                kinds[r.branch] = kinds.get(r.branch, 0) + 1
        kinds[cc.kind] = kinds.get(cc.kind, 0) + 1
    detail = ", ".join(f"{k}={v}" for k, v in sorted(kinds.items()))
    report(6, not bad, f"10^4 forests ({detail})")
    assert not bad, bad[:5]


# 7 -------------------------------------------------------------------------

def test_c7_phi_contracts(report):
    rng = random.Random(7)
    calls = phi2_checked = 0
    bad = []
    for _ in range(1000):
        n = rng.randint(1, 200)
        G = prefix_universal_graph(n)
        m = rng.choice([n, n, n - 1, rng.randint(1, n)]) or 1
        edges = [(v, rng.randrange(v)) for v in range(1, m) if rng.random() < 0.97]
        guest = (m, edges)
        x1, x2 = rng.randrange(m), rng.randrange(m)
        records: list = []
        e = embedder.embed(G, guest, x1, x2, stats=records)
        problems = embedder.validate_embedding(G, guest, e)
        if problems:
            bad.append((n, m, problems[:2]))
        for r in records:
            calls += 1
            if not r.phi1:
                bad.append(("phi1", r.case, r.depth))
            if r.phi2_required:
                phi2_checked += 1
                if not r.phi2:
                    bad.append(("phi2", r.case, r.depth))
    report(7, not bad, f"1000 instances, {calls} calls, Phi2 required in {phi2_checked}")
    assert not bad, bad[:5]


# 8 -------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _counted_edges(n: int, k: int) -> int:
    return sum(1 for _ in treewidth.build_universal_tw(n, k).edges())


def test_c8_treewidth_universal(report):
    bad = []
    for k in (2, 3):
        for seed in range(200):
            rng = random.Random(1000 * k + seed)
            n = rng.randint(k + 1, 48)
            H, W = treewidth.gen_partial_ktree(n, k, seed=seed)
            D = treewidth.normalize_decomposition(H, W, k)
            Gp = treewidth.build_universal_tw(n, k)
            pi = treewidth.embed_tw(H, D, Gp)
            problems = treewidth.validate_tw_embedding(H, Gp, pi)
            m = Gp.m
            formula = 9 * k * k * Gp.base.num_edges + math.comb(3 * k, 2) * m
            if problems or Gp.num_edges != formula or _counted_edges(n, k) != formula \
                    or Gp.num_vertices != 3 * k * m:
                bad.append((k, seed, n, problems[:2]))
    report(8, not bad, "k in {2,3}, 200 partial k-trees each, n<=48")
    assert not bad, bad[:5]


# 9 -------------------------------------------------------------------------

def test_c9_path_decomposition(report):
    bad = []
    for ell in range(1, 8):
        G, D = treewidth.path_decomposition_GB(ell)
        H = {v: set(nb) for v, nb in enumerate(G.adjacency)}
        rep = treewidth.validate_decomposition(H, D)
        if not rep["ok"] or rep["width"] > 4 * ell + 8:
            bad.append((ell, rep["width"], rep["problems"][:2]))
        counts = treewidth.bag_level_counts(G.base_tree, D)
        for lv in range(ell + 1):
            cap = 4 if lv < ell - 1 else 6
            if counts[:, lv].max() > cap:
                bad.append((ell, lv, int(counts[:, lv].max())))
    report(9, not bad, "l=1..7")
    assert not bad


# 10 ------------------------------------------------------------------------

def test_c10_new_hosts_interval_universal(report):
    bad = []
    checks = 0
    for k in (3, 4):
        G = generate(build_Tk(k).tree, 2)
        rep = oracle.verify_interval_universal(G, 7)
        checks += rep["checks"]
        if not rep["ok"]:
            bad.append((k, rep["failures"][:1]))
    report(10, not bad, f"G2_T3 and G2_T4 windows m<=7 ok ({checks} checks)")
    assert not bad


def test_c10_legacy_window_fails(report):
    rep = oracle.verify_interval_universal(generate_legacy(3), 6, stop_at_first=True)
    witness = rep["failures"][0] if rep["failures"] else None
    report(10, not rep["ok"],
           f"legacy G(3) failing length-6 window: {witness}" if witness
           else "legacy G(3): every window of length <= 6 contains every tree, no witness")
    assert not rep["ok"], "every window of legacy G(3) is universal"


# 11 ------------------------------------------------------------------------

def test_c11_one_per_level(report):
    bad = []
    for k in range(0, 7):
        T = build_Tk(k).tree
        worst = ks_trees.unsaturated_level_counts(T)
        if worst.max() > 1:
            bad.append((k, worst.tolist()))
    # the vectorised count agrees with the definition on small trees
    for k in range(0, 4):
        T = build_Tk(k).tree
        for t in range(1, T.n + 1):
            lit = ks_trees.unsaturated_set_literal(T, t)
            per_level = [0] * (T.height + 1)
            for v in lit:
                per_level[int(T.level[v])] += 1
            if max(per_level) > 1:
                bad.append((k, t, lit))
    report(11, not bad, "k<=6")
    assert not bad


# 12 ------------------------------------------------------------------------

def test_c12_tiny_exact_chain(report):
    bad = []
    rows = []
    for n in range(1, 6):
        s = oracle.exact_min_universal_edges(n)
        s_int = oracle.exact_min_universal_edges(n, interval=True)
        e_pref = prefix_universal_graph(n).num_edges
        psi = oracle.psi_lower_bound(n)
        rows.append(f"n={n}: {s}<={s_int}<={e_pref}")
        if not (s <= s_int <= e_pref and s >= n - 1 and s >= psi):
            bad.append((n, s, s_int, e_pref, psi))
    report(12, not bad, ", ".join(rows))
    assert not bad
