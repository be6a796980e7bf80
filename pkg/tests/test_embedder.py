from __future__ import annotations

import random

import pytest

from treeverse import oracle
from treeverse.embedder import (Embedding, PreconditionError, embed, embed_with_trace,
                                guest_adjacency, validate_embedding)
from treeverse.graph_gen import generate
from treeverse.ks_trees import build_Tk, prefix_universal_graph
from treeverse.tree_core import OrderedTree, path_tree


def star(n):
    return (n, [(0, v) for v in range(1, n)])


@pytest.mark.parametrize("n", [1, 2, 5, 9, 10])
def test_star(n):
    G = prefix_universal_graph(n)
    e = embed(G, star(n), x1=0)
    assert validate_embedding(G, star(n), e) == []
    assert oracle.check_subgraph_map(G, star(n), e.mapping)


def test_full_path_puts_x1_on_root():
    T = build_Tk(3).tree
    P = path_tree(34)
    e = embed(T, P, x1=0)
    assert e.mapping[0] == 0
    assert validate_embedding(T, P, e) == []


def test_single_vertex():
    e = embed(OrderedTree([-1]), (1, []))
    assert e.mapping == {0: 0} and e.admissible_complement


def test_forest_leaves_a_prefix_free():
    G = prefix_universal_graph(30)
    forest = (20, [(1, 0), (2, 1), (4, 3), (6, 5), (7, 5)] + [(v, v - 1) for v in range(9, 20)])
    e = embed(G, forest)
    assert validate_embedding(G, forest, e) == []
    assert sorted(e.mapping.values()) == list(range(10, 30))
    assert e.virtual_edges


def test_corrupted_map_is_caught():
    G = prefix_universal_graph(12)
    P = path_tree(12)
    e = embed(G, P)
    m = dict(e.mapping)
    m[0], m[5] = m[5], m[0]
    m[1] = m[2]
    bad = Embedding(e.guest_n, e.host_n, m, True)
    assert validate_embedding(G, P, bad)


def test_identity_of_base_tree_is_valid():
    T = build_Tk(3).tree
    ident = Embedding(T.n, T.n, {v: v for v in range(T.n)}, True)
    assert validate_embedding(T, T, ident) == []


def test_preconditions():
    G = prefix_universal_graph(9)
    with pytest.raises(PreconditionError):
        embed(G, path_tree(10))
    with pytest.raises(PreconditionError):
        embed(G, (3, [(0, 1), (1, 2), (2, 0)]))
    with pytest.raises(PreconditionError):
        embed(G, path_tree(4), x1=7)
    with pytest.raises(PreconditionError):
        embed(generate(build_Tk(2).tree, 0), path_tree(4))


def test_guest_formats_agree():
    T = path_tree(5)
    a = guest_adjacency(T)
    assert guest_adjacency((5, [(0, 1), (1, 2), (2, 3), (3, 4)])) == a
    assert guest_adjacency({0: [1], 1: [2], 2: [3], 3: [4], 4: []}) == a


def test_trace_on_path_into_t2():
    T = build_Tk(2).tree
    e, tr = embed_with_trace(T, path_tree(9))
    assert len(tr.taux_vertices) == 9
    d = tr.to_dict()
    assert d["parents"][0] is None and len(d["cases"]) >= 1


def test_trace_single_vertex():
    _, tr = embed_with_trace(OrderedTree([-1]), (1, []))
    assert tr.taux_vertices == [0]


def test_trace_random_small():
    rng = random.Random(4)
    for _ in range(150):
        n = rng.randint(1, 12)
        tree = (n, [(v, rng.randrange(v)) for v in range(1, n)])
        e, tr = embed_with_trace(prefix_universal_graph(n), tree)
        assert validate_embedding(prefix_universal_graph(n), tree, e) == []


def test_random_forests_and_roles():
    rng = random.Random(9)
    for _ in range(120):
        n = rng.randint(1, 140)
        G = prefix_universal_graph(n)
        m = rng.randint(1, n)
        g = (m, [(v, rng.randrange(v)) for v in range(1, m) if rng.random() < 0.95])
        stats: list = []
        e = embed(G, g, rng.randrange(m), rng.randrange(m), stats=stats)
        assert validate_embedding(G, g, e) == []
        assert all(r.phi1 and r.phi2 for r in stats)


def test_deterministic():
    G = prefix_universal_graph(60)
    g = (60, [(v, (v * 37 % 61) % v) for v in range(1, 60)])
    assert embed(G, g).to_json() == embed(G, g).to_json()
