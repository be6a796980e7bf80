from __future__ import annotations

import itertools

import pytest

from treeverse.graph_gen import (GeneratedGraph, dot_text, edgelist_text, generate, generate_legacy,
                                 induced_subgraph, verify_merge_embedding)
from treeverse.ks_trees import build_Tk
from treeverse.tree_core import OrderedTree, perfect_binary_tree


def test_b2_is_complete():
    G = generate(perfect_binary_tree(2), 0)
    assert G.num_edges == 21 and G.is_complete()


def test_single_vertex():
    for h in (0, 2):
        G = generate(OrderedTree([-1]), h)
        assert G.n == 1 and G.num_edges == 0


def test_tree_edges_are_g1():
    T = build_Tk(3).tree
    G = generate(T, 2)
    for p, c in T.edges():
        assert G.has_edge(p, c)
        assert ("G1", f"{p}->{c}") in G.provenance(p, c)


def test_more_ancestors_only_add_edges():
    T = build_Tk(3).tree
    e0 = set(generate(T, 0).edges())
    e2 = set(generate(T, 2).edges())
    assert e0 <= e2


def test_legacy_counterexample_window():
    G = generate_legacy(3)
    missing = [(a, b) for a, b in itertools.combinations(range(5, 11), 2) if not G.has_edge(a, b)]
    assert missing == [(5, 10), (6, 10), (7, 10)]
    assert induced_subgraph(G, range(5, 11)).num_edges == 12


@pytest.mark.parametrize("ell", [2, 3, 4])
def test_legacy_prefix_six_is_k6(ell):
    assert induced_subgraph(generate_legacy(ell), range(6)).num_edges == 15


def test_legacy_zero():
    G = generate_legacy(0)
    assert G.n == 1 and G.num_edges == 0


def test_induced_subgraph():
    G = generate(build_Tk(3).tree, 2)
    assert induced_subgraph(G, []).n == 0
    S = list(range(5, 11))
    H = induced_subgraph(G, S)
    want = {(a - 5, b - 5) for a, b in itertools.combinations(S, 2) if G.has_edge(a, b)}
    assert set(H.edges()) == want
    assert H.is_interval and not H.is_prefix


def test_merge_embedding_examples():
    T = build_Tk(3).tree
    u = T.children(0)[0]
    a, b = T.children(u)[:2]
    assert verify_merge_embedding(T, [a, b], 2)["ok"]
    B = perfect_binary_tree(3)
    assert verify_merge_embedding(B, B.children(1), 0)["ok"]


def test_merge_embedding_parent_condition():
    B = perfect_binary_tree(3)
    level3 = [int(v) for v in B.vertices_at_level(3)]
    # the parents of the first and last level-3 vertices are three cousins apart
    with pytest.raises(ValueError):
        verify_merge_embedding(B, level3, 0)


def test_exports_sorted_and_labelled():
    G = generate(perfect_binary_tree(2), 0)
    lines = edgelist_text(G).splitlines()
    pairs = [tuple(map(int, ln.split())) for ln in lines]
    assert pairs == sorted(pairs) and all(a < b for a, b in pairs)
    dot = dot_text(G, "B2")
    assert dot.startswith("graph B2 {") and "rules=" in dot


def test_from_edges():
    G = GeneratedGraph.from_edges(3, [(0, 1), (1, 2)])
    assert G.num_edges == 2 and G.has_edge(2, 1) and not G.has_edge(0, 2)
