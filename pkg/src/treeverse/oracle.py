"""Brute-force ground truth: tree catalogs, containment search, exact minima."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Sequence, Union

import mpmath

from .embedder import EmbeddingError, PreconditionError, embed, guest_adjacency, validate_embedding
from .graph_gen import GeneratedGraph
from .tree_core import OrderedTree, build_tree

ENUMERATION_CAP = 12
BRUTEFORCE_CAP = 64
EXACT_CAP = 6


class CapExceeded(ValueError):
    """Input is larger than the configured brute-force cap."""


# ---------------------------------------------------------------------------
# canonical forms and enumeration


def _centers(adj: Sequence[Sequence[int]]) -> list[int]:
    n = len(adj)
    if n <= 2:
        return list(range(n))
    deg = [len(a) for a in adj]
    layer = [v for v in range(n) if deg[v] == 1]
    left = n
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for b in adj[v]:
                deg[b] -= 1
                if deg[b] == 1:
                    nxt.append(b)
        layer = nxt
    return layer


def _rooted_code(adj: Sequence[Sequence[int]], root: int) -> str:
    # iterative post-order so deep paths do not hit the recursion limit
    code: dict[int, str] = {}
    stack = [(root, -1, False)]
    while stack:
        v, p, done = stack.pop()
        if done:
            code[v] = "(" + "".join(sorted(code[c] for c in adj[v] if c != p)) + ")"
        else:
            stack.append((v, p, True))
            stack.extend((c, v, False) for c in adj[v] if c != p)
    return code[root]


def canonical_code(adj: Sequence[Sequence[int]]) -> str:
    """AHU code of a free tree, rooted at its center(s) (the smaller code wins)."""
    if not adj:
        return ""
    return min(_rooted_code(adj, c) for c in _centers(adj))


def _code_to_tree(code: str) -> OrderedTree:
    parents: list[Optional[int]] = []
    stack: list[int] = []
    for ch in code:
        if ch == "(":
            parents.append(stack[-1] if stack else None)
            stack.append(len(parents) - 1)
        else:
            stack.pop()
    return build_tree(parents)


def _tree_adj_lists(tree) -> list[list[int]]:
    adj = guest_adjacency(tree)
    ids = sorted(adj)
    pos = {v: i for i, v in enumerate(ids)}
    return [[pos[b] for b in adj[v]] for v in ids]


@dataclass(frozen=True)
class TreeCatalog:
    n: int
    codes: tuple[str, ...]

    @property
    def trees(self) -> list[OrderedTree]:
        return [_code_to_tree(c) for c in self.codes]

    def __len__(self) -> int:
        return len(self.codes)


@lru_cache(maxsize=None)
def _grow(n: int) -> tuple[str, ...]:
    if n == 1:
        return ("()",)
    out = set()
    for code in _grow(n - 1):
        T = _code_to_tree(code)
        adj = _tree_adj_lists(T)
        for v in range(len(adj)):
            adj2 = [list(a) for a in adj] + [[v]]
            adj2[v].append(len(adj))
            out.add(canonical_code(adj2))
    return tuple(sorted(out))


def enumerate_trees(n: int, cap: int = ENUMERATION_CAP) -> TreeCatalog:
    """One representative per isomorphism class of free trees on n vertices."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the enumeration cap {cap}")
    return TreeCatalog(n, _grow(n))


def prufer_classes(n: int) -> set[str]:
    """Canonical codes of all labelled trees on n vertices via Prüfer sequences."""
    if n <= 2:
        return {canonical_code([[]] if n == 1 else [[1], [0]])}
    seen = set()
    for seq in itertools.product(range(n), repeat=n - 2):
        deg = [1] * n
        for s in seq:
            deg[s] += 1
        adj = [[] for _ in range(n)]
        for s in seq:
            leaf = deg.index(1)
            adj[leaf].append(s)
            adj[s].append(leaf)
            deg[leaf] -= 1
            deg[s] -= 1
        a, b = [v for v in range(n) if deg[v] == 1]
        adj[a].append(b)
        adj[b].append(a)
        seen.add(canonical_code(adj))
    return seen


def free_tree_counts(n_max: int) -> list[int]:
    """Number of free trees on 1..n_max vertices from the rooted-tree recurrence."""
    r = [0, 1]
    for m in range(1, n_max):
        s = 0
        for k in range(1, m + 1):
            dsum = sum(d * r[d] for d in range(1, k + 1) if k % d == 0)
            s += dsum * r[m - k + 1]
        r.append(s // m)
    out = []
    for n in range(1, n_max + 1):
        pairs = sum(r[i] * r[n - i] for i in range(1, n))
        mid = r[n // 2] if n % 2 == 0 else 0
        out.append(r[n] - (pairs - mid) // 2)
    return out


# ---------------------------------------------------------------------------
# brute-force containment


def _host_adj(G) -> list[set[int]]:
    if isinstance(G, GeneratedGraph):
        return [set(s) for s in G.adjacency]
    if isinstance(G, Mapping):
        ids = sorted(G)
        if ids != list(range(len(ids))):
            raise ValueError("host vertices must be 0..n-1")
        return [set(G[v]) for v in ids]
    return [set(s) for s in G]


def contains_tree_bruteforce(G, tree, cap: int = BRUTEFORCE_CAP) -> Optional[dict[int, int]]:
    """A subgraph embedding of ``tree`` into ``G``, or ``None`` if none exists."""
    hadj = _host_adj(G)
    gadj = guest_adjacency(tree)
    N, n = len(hadj), len(gadj)
    if N > cap:
        raise CapExceeded(f"host has {N} vertices, cap is {cap}")
    if n == 0:
        return {}
    if n > N:
        return None
    ids = sorted(gadj)
    lists = _tree_adj_lists(tree)
    root = _centers(lists)[0]

    # subtree sizes for the child ordering
    parent = {root: -1}
    order = [root]
    for v in order:
        for c in lists[v]:
            if c != parent[v]:
                parent[c] = v
                order.append(c)
    size = {v: 1 for v in order}
    for v in reversed(order[1:]):
        size[parent[v]] += size[v]
    stack = [root]
    seq = []
    while stack:
        v = stack.pop()
        seq.append(v)
        kids = sorted((c for c in lists[v] if c != parent[v]), key=lambda c: (size[c], c))
        stack.extend(kids)
    gdeg = [len(a) for a in lists]
    hdeg = [len(a) for a in hadj]

    phi = [-1] * n
    used = [False] * N

    def place(i: int) -> bool:
        if i == n:
            return True
        g = seq[i]
        if i == 0:
            cands = sorted(range(N), key=lambda h: (-hdeg[h], h))
        else:
            cands = sorted(hadj[phi[parent[g]]], key=lambda h: (-hdeg[h], h))
        for h in cands:
            if used[h] or hdeg[h] < gdeg[g]:
                continue
            phi[g] = h
            used[h] = True
            if place(i + 1):
                return True
            used[h] = False
        phi[g] = -1
        return False

    if not place(0):
        return None
    return {ids[g]: phi[g] for g in range(n)}


def check_subgraph_map(G, tree, phi: Mapping[int, int]) -> bool:
    hadj = _host_adj(G)
    gadj = guest_adjacency(tree)
    if set(phi) != set(gadj) or len(set(phi.values())) != len(phi):
        return False
    return all(phi[b] in hadj[phi[a]] for a in gadj for b in gadj[a])


# ---------------------------------------------------------------------------
# universality sweeps


def _embeddable_host(G) -> bool:
    return isinstance(G, GeneratedGraph) and G.base_tree is not None and G.h == 2 \
        and G.n == G.base_tree.n


def verify_universal(G, n: int, oracle_max: int = 8) -> dict:
    """Does G contain every n-vertex tree?  Embedder first, oracle as cross-check."""
    cat = enumerate_trees(n)
    failures = []
    use_embedder = _embeddable_host(G)
    hadj = _host_adj(G)
    oracle_checks = 0
    for code, T in zip(cat.codes, cat.trees):
        if use_embedder:
            try:
                e = embed(G, T)
                problems = validate_embedding(G, T, e)
            except (EmbeddingError, PreconditionError) as exc:
                problems = [str(exc)]
            if problems:
                failures.append({"tree": code, "reason": problems[0]})
                continue
            if n <= oracle_max and len(hadj) <= BRUTEFORCE_CAP:
                oracle_checks += 1
                if contains_tree_bruteforce(hadj, T) is None:
                    failures.append({"tree": code, "reason": "oracle disagrees with the embedder"})
        else:
            phi = contains_tree_bruteforce(hadj, T)
            oracle_checks += 1
            if phi is None:
                failures.append({"tree": code, "reason": "no embedding exists"})
    return {"n": n, "classes": len(cat), "ok": not failures, "failures": failures,
            "method": "embedder" if use_embedder else "oracle", "oracle_checks": oracle_checks}


def verify_interval_universal(G: GeneratedGraph, max_m: int, oracle_max: int = 7,
                              stop_at_first: bool = False) -> dict:
    """Check every DFS window of length m <= max_m for all m-vertex trees.

    For G²-hosts a window [i, i+m) is handled by embedding into the prefix
    tree of size i+m, whose admissible embeddings cover exactly its last m
    vertices; other hosts (the legacy construction) go to the oracle.
    """
    if G.base_tree is None:
        raise PreconditionError("interval universality needs a DFS-ordered base tree")
    T = G.base_tree
    use_embedder = _embeddable_host(G)
    hadj = _host_adj(G)
    checks = 0
    failures = []
    for m in range(1, max_m + 1):
        cat = enumerate_trees(m)
        trees = cat.trees
        for i in range(0, G.n - m + 1):
            window = list(range(i, i + m))
            wadj = [{b - i for b in hadj[a] if i <= b < i + m} for a in window]
            for code, tr in zip(cat.codes, trees):
                checks += 1
                ok, witness = True, None
                if use_embedder:
                    try:
                        e = embed(T.prefix(i + m), tr)
                        img = e.mapping
                        ok = set(img.values()) == set(window) and all(
                            img[b] in hadj[img[a]] for a, nb in guest_adjacency(tr).items() for b in nb)
                    except (EmbeddingError, PreconditionError):
                        ok = False
                    if m <= oracle_max and ok != (contains_tree_bruteforce(wadj, tr) is not None):
                        ok = False
                else:
                    ok = contains_tree_bruteforce(wadj, tr) is not None
                if not ok:
                    witness = {"window": [i, i + m - 1], "tree": code,
                               "tree_parents": [None] + [int(p) for p in tr.parent[1:]]}
                    failures.append(witness)
                    if stop_at_first:
                        return {"ok": False, "checks": checks, "failures": failures}
    return {"ok": not failures, "checks": checks, "failures": failures,
            "method": "embedder" if use_embedder else "oracle"}


# ---------------------------------------------------------------------------
# exact minima for tiny n


def _is_universal(adj: list[set[int]], trees: list[OrderedTree]) -> bool:
    return all(contains_tree_bruteforce(adj, t) is not None for t in trees)


def _interval_ok(adj: list[set[int]], n: int, catalogs: dict[int, list[OrderedTree]]) -> bool:
    for m in range(2, n + 1):
        for i in range(n - m + 1):
            w = [{b - i for b in adj[a] if i <= b < i + m} for a in range(i, i + m)]
            if not _is_universal(w, catalogs[m]):
                return False
    return True


def exact_min_universal_edges(n: int, interval: bool = False, budget_s: float = 300.0) -> int:
    """Minimum edge count of an n-vertex graph containing every n-vertex tree.

    With ``interval=True`` every window of consecutive vertices (in the
    vertex order) must contain every tree of the window's size.  The search
    scans edge sets by increasing size with no isomorphism pruning.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > EXACT_CAP:
        raise CapExceeded(f"n={n} exceeds the exact-search cap {EXACT_CAP}")
    if n == 1:
        return 0
    catalogs = {m: enumerate_trees(m).trees for m in range(1, n + 1)}
    pairs = list(itertools.combinations(range(n), 2))
    start = time.monotonic()
    for e in range(n - 1, len(pairs) + 1):
        for chosen in itertools.combinations(pairs, e):
            if time.monotonic() - start > budget_s:
                raise TimeoutError(f"budget of {budget_s}s exceeded at n={n}, e={e}")
            adj = [set() for _ in range(n)]
            for a, b in chosen:
                adj[a].add(b)
                adj[b].add(a)
            # every universal graph contains the star
            if max(len(s) for s in adj) < n - 1:
                continue
            if interval:
                if _interval_ok(adj, n, catalogs):
                    return e
            elif _is_universal(adj, catalogs[n]):
                return e
    raise AssertionError("the complete graph is always universal")


def psi_lower_bound(n: Union[int, float], dps: int = 50) -> mpmath.mpf:
    """n log2 n - 4 n sqrt(log2 n), evaluated at ``dps`` decimal digits."""
    if n < 1:
        raise ValueError("n must be at least 1")
    with mpmath.workdps(dps):
        x = mpmath.mpf(n)
        lg = mpmath.log(x, 2)
        return +(x * lg - 4 * x * mpmath.sqrt(lg))
