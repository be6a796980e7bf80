"""Admissible embeddings of forests into G²_T for (4,1)-trees T.

Every recursive call works on a *local* host tree ``H`` (a (4,1)-tree in
DFS order) and returns a map from guest vertices to local vertex ids of
``H``.  Sub-hosts are prefixes, subtrees or cousin merges of ``H``; their
results are translated back through the corresponding vertex maps.

Each call checks its own contract on return:

* the image is a DFS suffix of ``H`` (so the free part is admissible);
* the image of ``x1`` has minimum level in the image (Φ1);
* if the root of ``H`` has exactly two children and
  ``n - 2 >= n' >= ν(v_2) >= 2`` then the image of ``x2`` has level <= 2 (Φ2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from .graph_gen import GeneratedGraph, generate
from .ks_trees import is_ks_tree
from .splitter import (components, critical_branch, find_components_window, find_feasible_or_critical,
                       refine_critical, split_smallest_component)
from .tree_core import OrderedTree, merge_subtrees


class EmbeddingError(RuntimeError):
    """An internal contract of the embedding recursion failed."""


class PreconditionError(ValueError):
    """Inputs violate the requirements of :func:`embed`."""


Adjacency = dict[int, set[int]]


def guest_adjacency(guest) -> Adjacency:
    """Normalise a guest (OrderedTree, adjacency mapping or ``(n, edges)``)."""
    if isinstance(guest, OrderedTree):
        adj: Adjacency = {v: set() for v in range(guest.n)}
        for p, c in guest.edges():
            adj[p].add(c)
            adj[c].add(p)
        return adj
    if isinstance(guest, tuple) and len(guest) == 2:
        n, edges = guest
        adj = {v: set() for v in range(n)}
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj
    if isinstance(guest, Mapping):
        adj = {int(v): set(int(b) for b in nb) for v, nb in guest.items()}
        for v, nb in list(adj.items()):
            for b in nb:
                if b not in adj:
                    raise PreconditionError(f"neighbour {b} of {v} is not a vertex")
                adj[b].add(v)
        return adj
    raise PreconditionError(f"unsupported guest type {type(guest).__name__}")


def _check_forest(adj: Adjacency) -> None:
    m = sum(len(nb) for nb in adj.values()) // 2
    if any(v in nb for v, nb in adj.items()):
        raise PreconditionError("guest has a self-loop")
    if m != len(adj) - len(components(adj, adj)):
        raise PreconditionError("guest is not a forest")


@dataclass
class CallRecord:
    depth: int
    case: str
    host_n: int
    guest_n: int
    children: int
    phi1: bool
    phi2_required: bool
    phi2: bool
    cut_vertices: tuple = ()


@dataclass
class Embedding:
    guest_n: int
    host_n: int
    mapping: dict[int, int]
    admissible_complement: bool
    virtual_edges: list[tuple[int, int]] = field(default_factory=list)

    @property
    def map(self) -> list[int]:
        return [self.mapping[v] for v in sorted(self.mapping)]

    def to_dict(self) -> dict:
        return {"guest_n": self.guest_n, "host_n": self.host_n, "map": self.map,
                "admissible_complement": self.admissible_complement}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class RecursionTrace:
    taux: OrderedTree
    taux_vertices: list[int]  # taux DFS index -> guest vertex
    split_records: list[CallRecord]

    def parent_of(self) -> dict[int, Optional[int]]:
        out = {}
        for i, g in enumerate(self.taux_vertices):
            p = int(self.taux.parent[i])
            out[g] = None if p < 0 else self.taux_vertices[p]
        return out

    def to_dict(self) -> dict:
        return {"vertices": self.taux_vertices,
                "parents": [None if p < 0 else int(p) for p in self.taux.parent],
                "cases": [r.case for r in self.split_records]}


class _Embedder:
    def __init__(self, record: bool = True):
        self.records: list[CallRecord] = []
        self.record = record
        self.max_depth = 0
        self.depth_limit = 0

    # -- helpers -------------------------------------------------------

    @staticmethod
    def _tree_adj(adj: Adjacency, V: frozenset) -> Adjacency:
        """Guest restricted to V, made connected by chaining component minima."""
        local = {v: adj[v] & V for v in V}
        comps = components(local, V)
        for a, b in zip(comps, comps[1:]):
            ra, rb = min(a), min(b)
            local[ra] = local[ra] | {rb}
            local[rb] = local[rb] | {ra}
        return local

    def _sub(self, host: OrderedTree, to_parent: Callable[[int], int], adj: Adjacency,
             S: Iterable[int], r1: Optional[int], r2: Optional[int], depth: int) -> dict[int, int]:
        S = frozenset(S)
        if not S:
            return {}
        if r1 is None or r1 not in S:
            r1 = min(S)
        if r2 is None or r2 not in S:
            r2 = r1
        res = self._embed(host, adj, S, r1, r2, depth + 1)
        return {g: to_parent(l) for g, l in res.items()}

    def _prefix(self, H: OrderedTree, used: int) -> OrderedTree:
        m = H.n - used
        return H if m == H.n else H.prefix(m)

    def _merge(self, P: OrderedTree, u_list: list[int], root_image: int):
        T_star, vmap = merge_subtrees(P, u_list)
        vm = list(vmap)
        vm[0] = root_image
        return T_star, vm.__getitem__

    # -- main recursion ------------------------------------------------

    def _embed(self, H: OrderedTree, adj_in: Adjacency, V: frozenset, x1: int, x2: int,
               depth: int) -> dict[int, int]:
        n, npr = H.n, len(V)
        if npr > n:
            raise EmbeddingError(f"guest of size {npr} does not fit host of size {n}")
        self.max_depth = max(self.max_depth, depth)
        if depth > self.depth_limit:
            raise EmbeddingError("recursion depth bound exceeded")
        adj = self._tree_adj(adj_in, V)
        nu = H.nu
        kids = H.children(0)
        t = len(kids)
        cuts: tuple = ()

        if H.height <= 2:
            case = "base"
            slots = list(range(n - npr, n))
            s_star = min(slots, key=lambda s: (int(H.level[s]), s))
            phi = {x1: s_star}
            rest = iter(s for s in slots if s != s_star)
            for g in sorted(V - {x1}):
                phi[g] = next(rest)
        else:
            vt = kids[-1]
            if nu[vt] == 1:
                case = "nu1"
                P = self._prefix(H, 1)
                phi = self._sub(P, int, adj, V - {x1}, None, None, depth)
                if npr < n:
                    phi[x1] = vt
                else:
                    u0 = next(g for g, l in phi.items() if l == 0)
                    phi[u0] = vt
                    phi[x1] = 0
                    cuts = (u0,)
            elif npr < nu[vt]:
                case = "subtree"
                sub = H.subtree(vt)
                phi = self._sub(sub, lambda i, o=vt: i + o, adj, V, x1, x2, depth)
            elif t == 1:
                case = "1"
                sub = H.subtree(vt)
                if npr < n:
                    phi = self._sub(sub, lambda i, o=vt: i + o, adj, V, x1, x2, depth)
                else:
                    phi = self._sub(sub, lambda i, o=vt: i + o, adj, V - {x1}, None, None, depth)
                    phi[x1] = 0
            else:
                v1 = kids[0]
                rest_size = n - 1 - int(nu[v1])
                if npr <= rest_size and not (t == 2 and npr == int(nu[kids[1]])):
                    case = "D"
                    T_star, f = self._merge(H, kids[1:], 0)
                    phi = self._sub(T_star, f, adj, V, x1, x2, depth)
                elif t == 2:
                    phi, case, cuts = self._case2(H, adj, V, x1, x2, depth)
                else:
                    phi, case, cuts = self._case3(H, adj, V, x1, depth)

        self._check_call(H, V, phi, x1, x2, case, depth, cuts)
        return phi

    def _check_call(self, H, V, phi, x1, x2, case, depth, cuts):
        n, npr = H.n, len(V)
        images = sorted(phi.values())
        if set(phi) != set(V) or len(set(images)) != npr:
            raise EmbeddingError(f"case {case}: map is not a bijection onto its image")
        if images != list(range(n - npr, n)):
            raise EmbeddingError(f"case {case}: image is not a DFS suffix of the host")
        lv = H.level
        lo = min(int(lv[i]) for i in images)
        phi1 = int(lv[phi[x1]]) == lo
        kids = H.children(0)
        pre2 = (len(kids) == 2 and n - 2 >= npr >= int(H.nu[kids[1]]) >= 2)
        phi2 = (not pre2) or int(lv[phi[x2]]) <= 2
        if self.record:
            self.records.append(CallRecord(depth, case, n, npr, len(kids), phi1, pre2, phi2, cuts))
        if not phi1:
            raise EmbeddingError(f"case {case}: Φ1 violated")
        if not phi2:
            raise EmbeddingError(f"case {case}: Φ2 violated")

    # -- t = 2 ---------------------------------------------------------

    def _case2(self, H, adj, V, x1, x2, depth):
        n, npr = H.n, len(V)
        v1, v2 = H.children(0)
        grand = H.children(v1) + H.children(v2)
        T_star, f = self._merge(H, grand, v2)
        if npr <= n - 2:
            phi = self._sub(T_star, f, adj, V - {x1}, x2 if x2 != x1 else None, None, depth)
            phi[x1] = v2
            return phi, "2.1", (x1,)
        rest = V - {x1}
        deg = {g: len(adj[g] & rest) for g in rest}
        leaves = [g for g in rest if deg[g] == 1]
        if leaves:
            w = max(leaves)
            wp = next(iter(adj[w] & rest))
        else:
            iso = sorted(rest)
            w, wp = iso[-1], iso[-2]
        phi = self._sub(T_star, f, adj, rest - {w}, wp, None, depth)
        phi[w] = v1
        phi[x1] = v2 if npr == n - 1 else 0
        return phi, "2.2", (x1, w, wp)

    # -- t >= 3 --------------------------------------------------------

    def _case3(self, H, adj, V, x1, depth):
        kids = H.children(0)
        vt, vt1, vt2 = kids[-1], kids[-2], kids[-3]
        x, y, z = int(H.nu[vt]), int(H.nu[vt1]), int(H.nu[vt2])
        if x > y:
            cc = find_feasible_or_critical(adj, x1, x, y, V)
        else:
            cc = find_components_window(adj, x1, x - 1, V)
        if cc.kind == "critical" and cc.size > x + y - 2:
            return self._case32(H, adj, V, x1, cc, x, y, z, depth)
        return self._case31(H, adj, V, x1, cc, depth)

    def _case31(self, H, adj, V, x1, cc, depth):
        n, npr = H.n, len(V)
        kids = H.children(0)
        vt, vt1 = kids[-1], kids[-2]
        w = cc.w
        T0 = frozenset({w}) | cc.union
        T_star, f = self._merge(H, [vt1, vt], 0)
        # |T0| <= x+y-1: the image misses at most v_{t-1}, so w lands on v_t
        phi = self._sub(T_star, f, adj, T0, w, None, depth)
        if phi[w] != vt:
            raise EmbeddingError("case 3.1: cut vertex not placed on the last root child")
        P = self._prefix(H, len(T0))
        phi.update(self._sub(P, int, adj, V - T0, x1 if w != x1 else None, None, depth))
        if w == x1 and npr == n:
            u0 = next(g for g, l in phi.items() if l == 0)
            phi[u0] = vt
            phi[x1] = 0
        return phi, "3.1", (w,)

    def _case32(self, H, adj, V, x1, cc, x, y, z, depth):
        n, npr = H.n, len(V)
        kids = H.children(0)
        vt, vt1, vt2 = kids[-1], kids[-2], kids[-3]
        w = cc.w
        if critical_branch(cc, x, y) == "a":
            ref = refine_critical(adj, cc, x, y)
        else:
            # w stays with its leftover neighbours; only w' and C' move over
            ref = split_smallest_component(adj, cc, x, y)
        comps = list(ref.ordered)
        C1 = comps[0]
        Cp = ref.union
        wp, w1 = ref.w_prime, ref.w1
        CU = cc.union
        C0 = frozenset({w}) if npr >= x + y + z else V - CU
        nbr = {}
        for C in comps:
            nbr[C] = next(b for b in adj[w] if b in C)
        x1_left = x1 in C0 and x1 != w

        if ref.branch == "a":
            sub = "I"
            T0 = Cp | C0
            T1 = C1 - Cp
            t1_r2 = w1
        else:
            sub = "II"
            T1 = Cp | {wp}
            T0 = (C1 | C0) - T1
            t1_r2 = None

        phi: dict[int, int] = {}
        used = 0

        def advance(part):
            nonlocal used
            used += len(part)
            img = sorted(phi.values())
            if img != list(range(n - used, n)):
                raise EmbeddingError(f"case 3.2-{sub}: free vertices are not an admissible prefix")

        for C in reversed(comps[1:]):
            P = self._prefix(H, used)
            sub_t = P.subtree(vt)
            part = self._sub(sub_t, lambda i, o=vt: i + o, adj, C, nbr[C], None, depth)
            if int(H.parent[part[nbr[C]]]) != vt:
                raise EmbeddingError("case 3.2: component root not placed on a child of v_t")
            phi.update(part)
            advance(C)

        P = self._prefix(H, used)
        T_star, f = self._merge(P, [vt1, vt], 0)
        phi.update(self._sub(T_star, f, adj, T1, wp, t1_r2, depth))
        if phi[wp] != vt:
            raise EmbeddingError("case 3.2: w' not placed on v_t")
        advance(T1)

        P = self._prefix(H, used)
        T_star, f = self._merge(P, [vt2, vt1], 0)
        # w needs level <= 2 next to x1 on v_{t-1}, or v_{t-1} itself
        r1, r2 = (x1, w) if x1_left else (w, None)
        phi.update(self._sub(T_star, f, adj, T0, r1, r2, depth))
        advance(T0)

        rest = V - CU - C0
        if rest:
            P = self._prefix(H, used)
            phi.update(self._sub(P, int, adj, rest, x1 if x1 in rest else None, None, depth))
            advance(rest)

        if x1 == w and npr == n:
            u0 = next(g for g, l in phi.items() if l == 0)
            phi[u0] = vt1
            phi[x1] = 0
        return phi, f"3.2-{sub}", (w, wp)


# ---------------------------------------------------------------------------
# public API


@lru_cache(maxsize=64)
def _host_graph(T: OrderedTree) -> GeneratedGraph:
    return generate(T, 2)


def _resolve_host(host) -> tuple[OrderedTree, GeneratedGraph]:
    if isinstance(host, GeneratedGraph):
        if host.base_tree is None or host.h != 2 or host.n != host.base_tree.n:
            raise PreconditionError("host must be a full G² graph of its base tree")
        return host.base_tree, host
    if isinstance(host, OrderedTree):
        return host, _host_graph(host)
    raise PreconditionError(f"unsupported host type {type(host).__name__}")


def _run(host, guest, x1, x2, check_tree: bool):
    T, G = _resolve_host(host)
    adj = guest_adjacency(guest)
    _check_forest(adj)
    if len(adj) > T.n:
        raise PreconditionError(f"guest has {len(adj)} vertices but the host only {T.n}")
    if check_tree:
        ok, bad = is_ks_tree(T, 4, 1)
        if not ok:
            raise PreconditionError(f"host tree is not a (4,1)-tree: {bad}")
    V = frozenset(adj)
    if not V:
        return T, G, adj, Embedding(0, T.n, {}, True), _Embedder()
    if x1 is None:
        x1 = min(V)
    if x2 is None:
        x2 = x1
    if x1 not in V or x2 not in V:
        raise PreconditionError("x1 and x2 must be guest vertices")
    emb = _Embedder()
    maxdeg = max(len(T.children(u)) for u in range(T.n))
    emb.depth_limit = (T.height + 1) * (maxdeg + 2) + 2
    phi = emb._embed(T, adj, V, x1, x2, 0)
    virtual = []
    comps = components(adj, V)
    for a, b in zip(comps, comps[1:]):
        virtual.append((min(a), min(b)))
    image = set(phi.values())
    admissible = image == set(range(T.n - len(V), T.n))
    return T, G, adj, Embedding(len(V), T.n, phi, admissible, virtual), emb


def embed(host, guest, x1: Optional[int] = None, x2: Optional[int] = None,
          stats: Optional[list] = None, check_tree: bool = True) -> Embedding:
    """Embed a forest into G²_T so that the unused host vertices form a DFS prefix.

    ``host`` is a (4,1)-tree or its G² graph; ``guest`` is an OrderedTree,
    an adjacency mapping or ``(n, edges)``.  When ``stats`` is a list, one
    :class:`CallRecord` per recursive call is appended to it.
    """
    T, G, adj, e, emb = _run(host, guest, x1, x2, check_tree)
    if stats is not None:
        stats.extend(emb.records)
    return e


def validate_embedding(host, guest, e: Embedding) -> list[str]:
    """All violations of injectivity, adjacency and admissibility."""
    T, G = _resolve_host(host)
    adj = guest_adjacency(guest)
    problems = []
    if set(e.mapping) != set(adj):
        problems.append("map does not cover exactly the guest vertices")
    imgs = list(e.mapping.values())
    if len(set(imgs)) != len(imgs):
        problems.append("map is not injective")
    if any(not 0 <= i < G.n for i in imgs):
        problems.append("image outside the host")
        return problems
    for a, nb in adj.items():
        for b in nb:
            if a < b and a in e.mapping and b in e.mapping:
                if not G.has_edge(e.mapping[a], e.mapping[b]):
                    problems.append(f"edge {a}-{b} maps to non-edge "
                                    f"{e.mapping[a]}-{e.mapping[b]}")
    free = set(range(G.n)) - set(imgs)
    if free != set(range(len(free))):
        problems.append("unused host vertices are not an admissible prefix")
    if e.admissible_complement != (not problems or free == set(range(len(free)))):
        problems.append("admissible_complement flag is wrong")
    return problems


def build_taux(G: GeneratedGraph, adj: Adjacency, phi: Mapping[int, int]) -> RecursionTrace:
    """Recursion tree over the guest in which each node dominates its subtree.

    Each step takes a guest vertex set S (a component of what remains) and
    picks r in S whose image is adjacent to the images of all of S - r,
    preferring the lowest host level and then the largest host index; the
    children of r are the subtrees built on the components of S - r.
    """
    T = G.base_tree
    level = T.level if T is not None else np.zeros(G.n, dtype=np.int64)
    order: list[int] = []
    parent: list[int] = []
    stack = [(frozenset(adj), -1)]
    while stack:
        S, par = stack.pop()
        best = None
        for r in S:
            pr = phi[r]
            if all(G.has_edge(pr, phi[s]) for s in S if s != r):
                key = (int(level[pr]), -pr)
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            raise EmbeddingError("no dominating vertex for a recursion-tree step")
        r = best[1]
        idx = len(order)
        order.append(r)
        parent.append(par)
        for C in reversed(components(adj, S - {r})):
            stack.append((C, idx))
    return RecursionTrace(OrderedTree(parent), order, [])


def check_trace(G: GeneratedGraph, adj: Adjacency, phi: Mapping[int, int],
                tr: RecursionTrace) -> list[str]:
    """Domination, ancestor separation and guest ⊆ taux* (report only)."""
    problems = []
    tt = tr.taux
    verts = tr.taux_vertices
    pos = {g: i for i, g in enumerate(verts)}
    if set(verts) != set(adj) or len(verts) != len(adj):
        problems.append("taux vertex set differs from the guest")
        return problems
    for i, g in enumerate(verts):
        for j in tt.descendants(i):
            if not G.has_edge(phi[g], phi[verts[j]]):
                problems.append(f"{g} does not dominate {verts[j]}")
    for i, g in enumerate(verts):
        kids = tt.children(i)
        if len(kids) < 2:
            continue
        comp_of = {}
        for ci, C in enumerate(components(adj, set(adj) - {g})):
            for v in C:
                comp_of[v] = ci
        seen = {}
        for c in kids:
            ids = {comp_of[verts[j]] for j in tt.descendants(c, strict=False)}
            for cid in ids:
                if cid in seen and seen[cid] != c:
                    problems.append(f"subtrees under {g} share a component")
                seen[cid] = c
    for a, nb in adj.items():
        for b in nb:
            if a < b:
                ia, ib = pos[a], pos[b]
                if not (tt.is_ancestor(ia, ib) or tt.is_ancestor(ib, ia)):
                    problems.append(f"guest edge {a}-{b} missing from taux*")
    return problems


def embed_with_trace(host, guest, x1: Optional[int] = None, x2: Optional[int] = None,
                     check_tree: bool = True) -> tuple[Embedding, RecursionTrace]:
    """:func:`embed` plus a recursion tree whose invariants are asserted."""
    T, G, adj, e, emb = _run(host, guest, x1, x2, check_tree)
    if not adj:
        raise PreconditionError("a recursion trace needs a non-empty guest")
    tr = build_taux(G, adj, e.mapping)
    tr.split_records = emb.records
    problems = check_trace(G, adj, e.mapping, tr)
    if problems:
        raise EmbeddingError("recursion trace invariant failed: " + "; ".join(problems[:5]))
    return e, tr
