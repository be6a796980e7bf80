"""Generated graphs G^h_T and the legacy Chung-Graham graph G(k).

Arcs are materialised as numpy arrays ``(src, dst, rule)`` in emission
order, so the directed count with multiplicity is ``len(src)``; the simple
undirected graph is obtained by deduplicating ``min * n + max`` keys.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .tree_core import OrderedTree, merge_subtrees, perfect_binary_tree

RULES = ("G1", "G2", "G3", "G4", "L1", "L2", "L3")
RULE_CODE = {name: i for i, name in enumerate(RULES)}


def _expand_ranges(src: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Expand arcs ``src -> [lo, hi)`` into explicit (src, dst) arrays."""
    lens = np.maximum(hi - lo, 0)
    keep = lens > 0
    src, lo, lens = src[keep], lo[keep], lens[keep]
    total = int(lens.sum())
    if total == 0:
        e = np.zeros(0, dtype=np.int64)
        return e, e.copy()
    starts = np.cumsum(lens) - lens
    dst = np.arange(total, dtype=np.int64) - np.repeat(starts - lo, lens)
    return np.repeat(src, lens), dst


class GeneratedGraph:
    """Undirected simple graph over (a subset of) a tree's vertices.

    ``vertices[i]`` is the base-tree vertex behind local vertex ``i``; for a
    full generated graph this is the identity.  ``arc_src``/``arc_dst`` are
    local ids, ``arc_rule`` indexes :data:`RULES`.
    """

    def __init__(self, base_tree: Optional[OrderedTree], h: Optional[int], vertices,
                 arc_src, arc_dst, arc_rule, name: str = "", is_prefix: bool = True,
                 is_interval: bool = True):
        self.base_tree = base_tree
        self.h = h
        self.vertices = np.asarray(vertices, dtype=np.int64)
        self.arc_src = np.asarray(arc_src, dtype=np.int64)
        self.arc_dst = np.asarray(arc_dst, dtype=np.int64)
        self.arc_rule = np.asarray(arc_rule, dtype=np.int8)
        self.name = name
        self.is_prefix = is_prefix
        self.is_interval = is_interval
        self.meta: dict = {}

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "") -> "GeneratedGraph":
        """Plain graph with no base tree (e.g. an oracle host)."""
        e = np.array(list(edges), dtype=np.int64).reshape(-1, 2)
        return cls(None, None, np.arange(n), e[:, 0], e[:, 1],
                   np.full(len(e), -1, dtype=np.int8), name=name)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return self.n

    @property
    def num_arcs(self) -> int:
        return len(self.arc_src)

    @cached_property
    def _dedup(self):
        n = self.n
        a, b = self.arc_src, self.arc_dst
        loop = a == b
        a, b, r = a[~loop], b[~loop], self.arc_rule[~loop]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        keys = lo * n + hi
        uniq, inv = np.unique(keys, return_inverse=True)
        # bit r for arcs lo -> hi, bit r + 8 for hi -> lo
        bit = np.where(a < b, 1 << r.astype(np.int64), 1 << (r.astype(np.int64) + 8))
        bit[r < 0] = 0
        tags = np.zeros(len(uniq), dtype=np.int64)
        np.bitwise_or.at(tags, inv, bit)
        return uniq, tags

    @property
    def edge_keys(self) -> np.ndarray:
        return self._dedup[0]

    @property
    def num_edges(self) -> int:
        return len(self.edge_keys)

    @cached_property
    def edge_array(self) -> np.ndarray:
        k = self.edge_keys
        return np.stack([k // self.n, k % self.n], axis=1) if len(k) else np.zeros((0, 2), np.int64)

    def edges(self) -> list[tuple[int, int]]:
        return [(int(u), int(w)) for u, w in self.edge_array]

    @cached_property
    def _key_set(self) -> frozenset:
        return frozenset(self.edge_keys.tolist())

    def has_edge(self, u: int, w: int) -> bool:
        if u == w:
            return False
        if u > w:
            u, w = w, u
        return u * self.n + w in self._key_set

    def has_edges(self, us: np.ndarray, ws: np.ndarray) -> np.ndarray:
        us, ws = np.asarray(us, dtype=np.int64), np.asarray(ws, dtype=np.int64)
        keys = np.minimum(us, ws) * self.n + np.maximum(us, ws)
        return np.isin(keys, self.edge_keys) & (us != ws)

    @cached_property
    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, w in self.edge_array.tolist():
            adj[u].add(w)
            adj[w].add(u)
        return adj

    def neighbors(self, u: int) -> set[int]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def provenance(self, u: int, w: int) -> set[tuple[str, str]]:
        """Rule tags of edge uw as ``(rule, "u->w" | "w->u")`` pairs."""
        lo, hi = (u, w) if u < w else (w, u)
        key = lo * self.n + hi
        uniq, tags = self._dedup
        i = int(np.searchsorted(uniq, key))
        if i >= len(uniq) or uniq[i] != key:
            return set()
        out = set()
        for r, name in enumerate(RULES):
            if tags[i] >> r & 1:
                out.add((name, f"{lo}->{hi}"))
            if tags[i] >> (r + 8) & 1:
                out.add((name, f"{hi}->{lo}"))
        return out

    def edge_tags(self) -> list[tuple[int, int, list[str]]]:
        uniq, tags = self._dedup
        out = []
        for (u, w), t in zip(self.edge_array.tolist(), tags.tolist()):
            names = sorted({RULES[r] for r in range(len(RULES)) if (t >> r) & 1 or (t >> (r + 8)) & 1})
            out.append((u, w, names))
        return out

    def is_complete(self) -> bool:
        return self.num_edges == self.n * (self.n - 1) // 2

    def rule_arc_counts(self) -> dict[str, int]:
        counts = np.bincount(self.arc_rule[self.arc_rule >= 0].astype(np.int64), minlength=len(RULES))
        return {name: int(c) for name, c in zip(RULES, counts)}

    def __repr__(self) -> str:
        return f"GeneratedGraph({self.name or 'graph'}, n={self.n}, edges={self.num_edges})"


# ---------------------------------------------------------------------------
# arc emission


def _g1_g2_g3(T: OrderedTree, legacy: bool) -> tuple[list, list, list]:
    n = T.n
    idx = np.arange(n, dtype=np.int64)
    nu, par = T.nu, T.parent
    parts_s, parts_d, parts_r = [], [], []

    s, d = _expand_ranges(idx, idx + 1, idx + nu)
    parts_s.append(s); parts_d.append(d)
    parts_r.append(np.full(len(s), RULE_CODE["L1" if legacy else "G1"], np.int8))

    # left siblings of u and their descendants fill [parent(u) + 1, u)
    nonroot = idx[1:]
    s, d = _expand_ranges(nonroot, par[1:] + 1, nonroot)
    parts_s.append(s); parts_d.append(d)
    parts_r.append(np.full(len(s), RULE_CODE["L2" if legacy else "G2"], np.int8))

    pstar = par[1:]
    if legacy:
        # left sibling of the parent (if any): the first child of the grandparent
        gp = np.where(pstar > 0, par[np.maximum(pstar, 0)], -1)
        w = np.where(gp >= 0, gp + 1, -1)
        w = np.where(w == pstar, -1, w)
        w = np.where(pstar > 0, w, -1)
    else:
        w = T.left_cousin[pstar]
    ok = w >= 0
    src, w = nonroot[ok], w[ok]
    s, d = _expand_ranges(src, w, w + nu[w])
    parts_s.append(s); parts_d.append(d)
    parts_r.append(np.full(len(s), RULE_CODE["L3" if legacy else "G3"], np.int8))
    return parts_s, parts_d, parts_r


def _g4(T: OrderedTree, h: int) -> tuple[list, list]:
    if h <= 0:
        return [], []
    nu, lv = T.nu, T.level
    lc, rc = T.left_cousin, T.right_cousin
    parts_s, parts_d = [], []

    def shallow(a: int, depth_max: int) -> np.ndarray:
        # a and its descendants down to level depth_max
        sl = slice(a, a + int(nu[a]))
        return a + np.nonzero(lv[sl] <= depth_max)[0]

    # u with 0 < L(u) < h: the h-th ancestor saturates at the root
    for d in range(1, min(h, T.height + 1)):
        src = np.nonzero(lv == d)[0]
        dst = np.nonzero(lv <= d)[0]
        parts_s.append(np.repeat(src, len(dst)))
        parts_d.append(np.tile(dst, len(src)))

    # u with L(u) >= h, grouped by a = the h-th ancestor
    cand = np.nonzero(lv <= T.height - h)[0]
    for a in cand.tolist():
        la = int(lv[a])
        sl = slice(a, a + int(nu[a]))
        src = a + np.nonzero(lv[sl] == la + h)[0]
        if len(src) == 0:
            continue
        tg = [shallow(a, la + h)]
        for c in (int(lc[a]), int(rc[a])):
            if c >= 0:
                tg.append(shallow(c, la + h))
        dst = np.concatenate(tg)
        parts_s.append(np.repeat(src, len(dst)))
        parts_d.append(np.tile(dst, len(src)))
    return parts_s, parts_d


def generate(T: OrderedTree, h: int = 0) -> GeneratedGraph:
    """G^h_T (rules G1-G4); ``h = 0`` omits G4 entirely."""
    if h < 0:
        raise ValueError("h must be non-negative")
    ps, pd, pr = _g1_g2_g3(T, legacy=False)
    s4, d4 = _g4(T, h)
    ps += s4
    pd += d4
    pr += [np.full(len(s), RULE_CODE["G4"], np.int8) for s in s4]
    src = np.concatenate(ps) if ps else np.zeros(0, np.int64)
    dst = np.concatenate(pd) if pd else np.zeros(0, np.int64)
    rule = np.concatenate(pr) if pr else np.zeros(0, np.int8)
    loop = src == dst
    return GeneratedGraph(T, h, np.arange(T.n), src[~loop], dst[~loop], rule[~loop],
                          name=f"G^{h}_T")


def generate_legacy(k: int) -> GeneratedGraph:
    """Chung-Graham G(k) on B(k): rule (iii) uses the parent's left sibling."""
    if k < 0:
        raise ValueError("k must be non-negative")
    T = perfect_binary_tree(k)
    ps, pd, pr = _g1_g2_g3(T, legacy=True)
    return GeneratedGraph(T, None, np.arange(T.n), np.concatenate(ps), np.concatenate(pd),
                          np.concatenate(pr), name=f"G({k})")


def induced_subgraph(G: GeneratedGraph, S: Iterable[int]) -> GeneratedGraph:
    """G[S] with local ids renumbered in increasing order of S."""
    S = np.unique(np.fromiter((int(s) for s in S), dtype=np.int64))
    if len(S) and (S[0] < 0 or S[-1] >= G.n):
        raise IndexError("vertex set not contained in the graph")
    local = np.full(G.n, -1, dtype=np.int64)
    local[S] = np.arange(len(S))
    a, b = local[G.arc_src], local[G.arc_dst]
    keep = (a >= 0) & (b >= 0)
    verts = G.vertices[S]
    contiguous = len(S) == 0 or (verts[-1] - verts[0] + 1 == len(S))
    is_interval = bool(G.is_interval and contiguous)
    is_prefix = bool(G.is_prefix and contiguous and (len(S) == 0 or verts[0] == 0))
    return GeneratedGraph(G.base_tree, G.h, verts, a[keep], b[keep], G.arc_rule[keep],
                          name=f"{G.name}[S]", is_prefix=is_prefix, is_interval=is_interval)


def verify_merge_embedding(T: OrderedTree, u_list: Sequence[int], h: int,
                           G_T: Optional[GeneratedGraph] = None) -> dict:
    """Check that G^h_{T*} maps into G^h_T with the merged root sent to u_t*."""
    u_list = [int(u) for u in u_list]
    if not u_list or u_list[0] == 0:
        raise ValueError("merged vertices must be non-root")
    T_star, vmap = merge_subtrees(T, u_list)
    p1, pt = int(T.parent[u_list[0]]), int(T.parent[u_list[-1]])
    if not (p1 == pt or p1 == int(T.left_cousin[pt])):
        raise ValueError("parent condition violated: need u_1* = u_t* or u_1* = l(u_t*)")
    if G_T is None:
        G_T = generate(T, h)
    G_star = generate(T_star, h)
    vm = np.array(vmap, dtype=np.int64)
    vm[0] = pt
    e = G_star.edge_array
    mu, mw = vm[e[:, 0]], vm[e[:, 1]]
    ok = G_T.has_edges(mu, mw)
    bad = [(int(a), int(b)) for a, b in e[~ok]]
    return {"ok": not bad, "violations": bad, "t_star": T_star,
            "edges_checked": int(len(e)), "root_image": pt}


def edgelist_text(G: GeneratedGraph) -> str:
    return "".join(f"{u} {w}\n" for u, w in G.edge_array.tolist())


def dot_text(G: GeneratedGraph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in range(G.n):
        lines.append(f"  {v};")
    for u, w, tags in G.edge_tags():
        lab = ",".join(tags)
        lines.append(f'  {u} -- {w} [rules="{lab}"];' if lab else f"  {u} -- {w};")
    lines.append("}")
    return "\n".join(lines) + "\n"
