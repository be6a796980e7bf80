from __future__ import annotations

import pytest

from treeverse import oracle
from treeverse.graph_gen import GeneratedGraph, generate, generate_legacy, induced_subgraph
from treeverse.ks_trees import build_Tk, prefix_universal_graph
from treeverse.tree_core import path_tree


@pytest.mark.parametrize("n,count", [(1, 1), (4, 2), (7, 11), (9, 47)])
def test_enumerate_trees(n, count):
    cat = oracle.enumerate_trees(n)
    assert len(cat) == count
    assert len({oracle.canonical_code(oracle._tree_adj_lists(t)) for t in cat.trees}) == count


def test_counts_match_counting_formula():
    counts = oracle.free_tree_counts(12)
    assert counts == [1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551]
    for n in range(1, 13):
        assert len(oracle.enumerate_trees(n)) == counts[n - 1]


@pytest.mark.parametrize("n", range(1, 9))
def test_prufer_generation_agrees(n):
    assert oracle.prufer_classes(n) == set(oracle.enumerate_trees(n).codes)


def test_enumeration_cap():
    with pytest.raises(oracle.CapExceeded):
        oracle.enumerate_trees(13)


def test_bruteforce_containment():
    k6 = [set(range(6)) - {v} for v in range(6)]
    for t in oracle.enumerate_trees(6).trees:
        phi = oracle.contains_tree_bruteforce(k6, t)
        assert phi is not None and oracle.check_subgraph_map(k6, t, phi)
    assert oracle.contains_tree_bruteforce([set(), set()], path_tree(2)) is None


def test_star_in_legacy_window():
    W = induced_subgraph(generate_legacy(3), range(5, 11))
    degs = [W.degree(v) for v in range(6)]
    assert degs[5] == 2 and max(degs) == 5
    stars = [t for t in oracle.enumerate_trees(6).trees if len(t.children(0)) == 5]
    assert len(stars) == 1
    assert oracle.contains_tree_bruteforce(W, stars[0]) is not None


def test_verify_universal():
    rep = oracle.verify_universal(prefix_universal_graph(9), 9)
    assert rep["ok"] and rep["classes"] == 47
    bad = oracle.verify_universal(GeneratedGraph.from_edges(2, []), 2)
    assert not bad["ok"] and bad["method"] == "oracle"


def test_interval_universal_t3():
    G = generate(build_Tk(3).tree, 2)
    rep = oracle.verify_interval_universal(G, 5)
    assert rep["ok"]
    assert rep["checks"] == sum((34 - m + 1) * c for m, c in zip(range(1, 6), [1, 1, 1, 2, 3]))


def test_interval_length_one_always_passes():
    rep = oracle.verify_interval_universal(generate_legacy(3), 1)
    assert rep["ok"] and rep["checks"] == 15


def test_exact_small_values():
    assert oracle.exact_min_universal_edges(1) == 0
    assert oracle.exact_min_universal_edges(2) == 1
    assert oracle.exact_min_universal_edges(3) == 2
    assert oracle.exact_min_universal_edges(4) == 4
    with pytest.raises(oracle.CapExceeded):
        oracle.exact_min_universal_edges(7)


def test_psi():
    assert oracle.psi_lower_bound(1) == 0
    assert oracle.psi_lower_bound(2) == -6
    assert float(oracle.psi_lower_bound(1024)) == pytest.approx(1024 * 10 - 4 * 1024 * 10 ** 0.5, rel=1e-12)
