"""Treewidth-k universality through clique blow-ups of a tree-universal host.

A graph H is a plain adjacency mapping ``{vertex: set(neighbours)}``; a
tree decomposition keeps its index tree as a parent list (``None`` for the
root) so node ids stay exactly as supplied.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .embedder import PreconditionError, embed_with_trace
from .graph_gen import GeneratedGraph, generate
from .ks_trees import prefix_universal_graph
from .splitter import components
from .tree_core import OrderedTree, build_tree, perfect_binary_tree

Graph = Mapping[int, set]


class DecompositionError(ValueError):
    """Normalization could not meet its size targets."""


def graph_from_edges(vertices: Iterable[int], edges: Iterable[tuple[int, int]]) -> dict[int, set]:
    adj: dict[int, set] = {int(v): set() for v in vertices}
    for a, b in edges:
        a, b = int(a), int(b)
        if a == b:
            raise ValueError(f"self-loop at {a}")
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    return adj


def graph_edges(H: Graph) -> list[tuple[int, int]]:
    return sorted((a, b) for a in H for b in H[a] if a < b)


@dataclass(frozen=True)
class TreeDecomposition:
    parents: tuple[Optional[int], ...]
    bags: tuple[frozenset, ...]

    def __post_init__(self):
        if len(self.parents) != len(self.bags):
            raise ValueError("one parent entry per bag is required")

    @classmethod
    def from_lists(cls, parents: Sequence[Optional[int]], bags: Sequence[Iterable[int]]) -> "TreeDecomposition":
        return cls(tuple(None if p is None else int(p) for p in parents),
                   tuple(frozenset(int(v) for v in b) for b in bags))

    @property
    def size(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    @cached_property
    def index_tree(self) -> OrderedTree:
        """The index tree in DFS order; ``labels`` maps back to node ids."""
        return build_tree(list(self.parents))

    def tree_adjacency(self) -> dict[int, set]:
        return graph_from_edges(range(self.size), [(i, p) for i, p in enumerate(self.parents) if p is not None])

    def to_dict(self) -> dict:
        return {"bags": [sorted(b) for b in self.bags], "tree_parents": list(self.parents)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TreeDecomposition":
        return cls.from_lists(d["tree_parents"], d["bags"])


def validate_decomposition(H: Graph, D: TreeDecomposition) -> dict:
    """Check D1 (each vertex spans a nonempty subtree) and D2 (edges covered)."""
    problems = []
    try:
        D.index_tree
    except ValueError as exc:
        return {"ok": False, "width": D.width, "problems": [f"index structure is not a tree: {exc}"]}
    verts = set(H)
    holders: dict[int, list[int]] = {v: [] for v in verts}
    for i, bag in enumerate(D.bags):
        for v in bag:
            if v not in verts:
                problems.append(f"bag {i} holds {v}, which is not a vertex of H")
            else:
                holders[v].append(i)
    tadj = D.tree_adjacency()
    for v, nodes in holders.items():
        if not nodes:
            problems.append(f"D1: vertex {v} is in no bag")
        elif len(components(tadj, nodes)) != 1:
            problems.append(f"D1: bags holding {v} are not connected")
    for a, b in graph_edges(H):
        if not set(holders.get(a, ())) & set(holders.get(b, ())):
            problems.append(f"D2: edge {a}-{b} is in no bag")
    return {"ok": not problems, "width": D.width, "problems": problems}


# ---------------------------------------------------------------------------
# normalization


def normalize_decomposition(H: Graph, D: TreeDecomposition, k: int) -> TreeDecomposition:
    """Coarsen a width-<=k decomposition to <= floor(n/k)+1 bags of size <= 3k.

    Nodes are weighted by the vertices they introduce (those whose topmost
    bag they are).  Working bottom-up, the light leftovers of the children of
    a node are packed into sibling groups that close once they reach weight
    k; a last open group joins the node itself.  Closed groups weigh between
    k and 2k, and every vertex of a group outside its own introductions sits
    in the bag above it, which keeps each merged bag at most 3k.
    """
    if k < 1:
        raise PreconditionError("k must be at least 1")
    rep = validate_decomposition(H, D)
    if not rep["ok"]:
        raise PreconditionError("supplied witness is not a tree decomposition: " + rep["problems"][0])
    if D.width > k:
        raise PreconditionError(f"witness has width {D.width}, more than k={k}")
    n = len(H)
    T = D.index_tree
    node_of = list(T.labels)  # DFS position -> node id
    # the topmost (smallest DFS position) bag holding a vertex introduces it
    top: dict[int, int] = {}
    for pos, node in enumerate(node_of):
        for v in D.bags[node]:
            top.setdefault(v, pos)
    weight = np.zeros(T.n, dtype=np.int64)
    for pos in top.values():
        weight[pos] += 1

    group = np.full(T.n, -1, dtype=np.int64)
    n_groups = 0
    open_part: dict[int, list[int]] = {}  # DFS position -> positions of its open group
    open_weight = np.zeros(T.n, dtype=np.int64)
    for pos in range(T.n - 1, -1, -1):
        bins: list[tuple[int, list[int]]] = []
        cur, cur_w = [], 0
        for c in sorted(T.children(pos), key=lambda c: (-int(open_weight[c]), c)):
            if c not in open_part:
                continue
            cur = cur + open_part.pop(c)
            cur_w += int(open_weight[c])
            if cur_w >= k:
                bins.append((cur_w, cur))
                cur, cur_w = [], 0
        for _, members in bins:
            group[members] = n_groups
            n_groups += 1
        mine = [pos] + cur
        w = int(weight[pos]) + cur_w
        if w >= k or pos == 0:
            group[mine] = n_groups
            n_groups += 1
        else:
            open_part[pos] = mine
            open_weight[pos] = w

    # quotient tree: a group's parent holds the parent of its top node
    gparent: dict[int, Optional[int]] = {}
    gbags: dict[int, set] = {}
    for pos in range(T.n):
        g = int(group[pos])
        gbags.setdefault(g, set()).update(D.bags[node_of[pos]])
        if g not in gparent:
            gparent[g] = None if pos == 0 else int(group[T.parent[pos]])
    order = sorted(gparent, key=lambda g: min(np.nonzero(group == g)[0]))
    relabel = {g: i for i, g in enumerate(order)}
    out = TreeDecomposition.from_lists(
        [None if gparent[g] is None else relabel[gparent[g]] for g in order],
        [gbags[g] for g in order])

    rep = validate_decomposition(H, out)
    if not rep["ok"]:
        raise DecompositionError("normalized decomposition is invalid: " + rep["problems"][0])
    if out.size > n // k + 1:
        raise DecompositionError(f"{out.size} bags exceed the target {n // k + 1}")
    if out.width + 1 > 3 * k:
        raise DecompositionError(f"a bag of size {out.width + 1} exceeds 3k = {3 * k}")
    return out


# ---------------------------------------------------------------------------
# blow-up


@dataclass(frozen=True)
class BlowupGraph:
    base: GeneratedGraph
    k: int
    n: int

    @property
    def m(self) -> int:
        return self.base.n

    @property
    def clique_size(self) -> int:
        return 3 * self.k

    @property
    def num_vertices(self) -> int:
        return self.clique_size * self.m

    def clique(self, x: int) -> range:
        s = self.clique_size
        return range(x * s, (x + 1) * s)

    def base_vertex(self, v: int) -> int:
        return v // self.clique_size

    @property
    def num_edges(self) -> int:
        """9k² e(G) + C(3k, 2) m."""
        s = self.clique_size
        return s * s * self.base.num_edges + comb(s, 2) * self.m

    def has_edge(self, a: int, b: int) -> bool:
        if a == b:
            return False
        xa, xb = self.base_vertex(a), self.base_vertex(b)
        return xa == xb or self.base.has_edge(xa, xb)

    def edges(self):
        s = self.clique_size
        for x in range(self.m):
            c = self.clique(x)
            for i in range(s):
                for j in range(i + 1, s):
                    yield c[i], c[j]
        for x, y in self.base.edges():
            for a in self.clique(x):
                for b in self.clique(y):
                    yield (a, b) if a < b else (b, a)

    def stats(self) -> dict:
        return {"n": self.n, "k": self.k, "m": self.m, "vertices": self.num_vertices,
                "base_edges": self.base.num_edges, "edges": self.num_edges}


def build_universal_tw(n: int, k: int) -> BlowupGraph:
    if not n >= k >= 1:
        raise PreconditionError(f"need n >= k >= 1, got n={n}, k={k}")
    m = n // k + 1
    return BlowupGraph(prefix_universal_graph(m), k, n)


def embed_tw(H: Graph, D: TreeDecomposition, Gp: BlowupGraph) -> dict[int, int]:
    """Injective, edge-preserving map V(H) -> V(G') through the index tree."""
    s = Gp.clique_size
    if D.width + 1 > s:
        raise PreconditionError(f"bags of size {D.width + 1} exceed the clique size {s}")
    if D.size > Gp.m:
        raise PreconditionError(f"{D.size} bags but the base host has {Gp.m} vertices")
    if len(H) > Gp.n:
        raise PreconditionError(f"H has {len(H)} vertices, the host was built for {Gp.n}")
    e, trace = embed_with_trace(Gp.base, D.tree_adjacency())
    lam = e.mapping
    tt = trace.taux
    taux_level = {g: int(tt.level[i]) for i, g in enumerate(trace.taux_vertices)}

    holders: dict[int, list[int]] = {v: [] for v in H}
    for i, bag in enumerate(D.bags):
        for v in bag:
            holders[v].append(i)
    f = {}
    for v, nodes in holders.items():
        if not nodes:
            raise PreconditionError(f"vertex {v} is in no bag")
        best = min(taux_level[i] for i in nodes)
        top = [i for i in nodes if taux_level[i] == best]
        assert len(top) == 1, f"minimum-level node of T_{v} is not unique"
        f[v] = top[0]

    used: dict[int, int] = {}
    pi = {}
    for v in sorted(H):
        x = lam[f[v]]
        slot = used.get(x, 0)
        assert slot < s, "clique slots exhausted"
        used[x] = slot + 1
        pi[v] = x * s + slot

    problems = validate_tw_embedding(H, Gp, pi)
    if problems:
        raise AssertionError("treewidth embedding failed validation: " + problems[0])
    return pi


def validate_tw_embedding(H: Graph, Gp: BlowupGraph, pi: Mapping[int, int]) -> list[str]:
    problems = []
    if set(pi) != set(H):
        problems.append("map does not cover V(H) exactly")
    if len(set(pi.values())) != len(pi):
        problems.append("map is not injective")
    for v, img in pi.items():
        if not 0 <= img < Gp.num_vertices:
            problems.append(f"{v} mapped outside G'")
    for a, b in graph_edges(H):
        if a in pi and b in pi and not Gp.has_edge(pi[a], pi[b]):
            problems.append(f"edge {a}-{b} not preserved")
    return problems


# ---------------------------------------------------------------------------
# path decomposition of G_{B(l)}


def path_decomposition_GB(ell: int) -> tuple[GeneratedGraph, TreeDecomposition]:
    """Bags N[x_i] over the leaves x_1..x_{2^l} of B(l), strung along a path."""
    if ell < 1:
        raise ValueError("l must be at least 1")
    T = perfect_binary_tree(ell)
    G = generate(T, 0)
    adj = G.adjacency
    leaves = [int(x) for x in T.leaves()]
    bags = [adj[x] | {x} for x in leaves]
    parents = [None] + list(range(len(leaves) - 1))
    return G, TreeDecomposition.from_lists(parents, bags)


def bag_level_counts(T: OrderedTree, D: TreeDecomposition) -> np.ndarray:
    """Per bag, the number of its vertices on each level of T."""
    out = np.zeros((D.size, T.height + 1), dtype=np.int64)
    for i, bag in enumerate(D.bags):
        for v in bag:
            out[i, T.level[v]] += 1
    return out


# ---------------------------------------------------------------------------
# instances


def gen_partial_ktree(n: int, k: int, seed: int = 0, keep: float = 0.8) -> tuple[dict[int, set], TreeDecomposition]:
    """Random k-tree on n vertices with edges kept at rate ``keep``.

    The witness has one bag per construction step: the initial (k+1)-clique,
    then each new vertex with the k-clique it was attached to.
    """
    if n < k + 1 or k < 1:
        raise PreconditionError(f"need n >= k+1 and k >= 1, got n={n}, k={k}")
    rng = random.Random(seed)
    bags = [frozenset(range(k + 1))]
    parents: list[Optional[int]] = [None]
    cliques = [(frozenset(c), 0) for c in _k_subsets(range(k + 1), k)]
    edges = {(a, b) for a in range(k + 1) for b in range(a + 1, k + 1)}
    for v in range(k + 1, n):
        base, node = cliques[rng.randrange(len(cliques))]
        bags.append(base | {v})
        parents.append(node)
        idx = len(bags) - 1
        for a in base:
            edges.add((a, v))
        for sub in _k_subsets(sorted(base), k - 1):
            cliques.append((frozenset(sub) | {v}, idx))
    kept = [e for e in sorted(edges) if rng.random() < keep]
    H = graph_from_edges(range(n), kept)
    return H, TreeDecomposition.from_lists(parents, bags)


def _k_subsets(items, r):
    from itertools import combinations
    return [tuple(c) for c in combinations(items, r)]


def min_degree_decomposition(H: Graph) -> TreeDecomposition:
    """Elimination-order decomposition from the min-degree heuristic."""
    adj = {v: set(nb) for v, nb in H.items()}
    order, bag_of = [], {}
    while adj:
        v = min(adj, key=lambda u: (len(adj[u]), u))
        nb = adj.pop(v)
        bag_of[v] = frozenset(nb | {v})
        order.append(v)
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
    pos = {v: i for i, v in enumerate(order)}
    parents: list[Optional[int]] = []
    for v in order:
        later = [pos[u] for u in bag_of[v] if u != v]
        parents.append(min(later) if later else None)
    # several roots are possible for disconnected graphs: chain them
    roots = [i for i, p in enumerate(parents) if p is None]
    for r in roots[:-1]:
        parents[r] = roots[-1]
    return TreeDecomposition.from_lists(parents, [bag_of[v] for v in order])
