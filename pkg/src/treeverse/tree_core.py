"""Rooted ordered trees addressed by DFS preorder index.

Every :class:`OrderedTree` stores its vertices in DFS preorder, so vertex
``u`` owns the contiguous index range ``[u, u + nu[u])`` and an admissible
prefix of size ``t`` is simply ``range(t)``.  Children never need to be
stored: the first child of ``u`` is ``u + 1`` and the next sibling of ``c``
is ``c + nu[c]``.
"""

from __future__ import annotations

import json
from functools import cached_property
from typing import Iterator, Optional, Sequence

import numpy as np


class StructureError(ValueError):
    """Raised for malformed tree input (cycles, several roots, bad ids)."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class OrderedTree:
    """Immutable DFS-ordered rooted tree.

    ``parent[u]`` is ``-1`` for the root (always vertex 0).  ``labels`` keeps
    the caller's vertex ids, in DFS order, when the tree was built from
    arbitrary input.
    """

    __slots__ = ("parent", "nu", "level", "labels", "__dict__")

    def __init__(self, parent, nu=None, level=None, labels=None):
        parent = np.asarray(parent, dtype=np.int64)
        n = len(parent)
        if n == 0:
            raise StructureError("empty tree")
        if parent[0] != -1 or (n > 1 and (parent[1:] < 0).any()):
            raise StructureError("vertex 0 must be the unique root")
        if n > 1 and (parent[1:] >= np.arange(1, n)).any():
            raise StructureError("parent must precede child in DFS order")
        if nu is None or level is None:
            p = parent.tolist()
            nl = [1] * n
            lv = [0] * n
            path = [0]
            for u in range(1, n):
                # in preorder the parent of u lies on the root path of u - 1
                while path and path[-1] != p[u]:
                    path.pop()
                if not path:
                    raise StructureError("parent array is not in DFS preorder")
                lv[u] = lv[p[u]] + 1
                path.append(u)
            for u in range(n - 1, 0, -1):
                nl[p[u]] += nl[u]
            nu = np.array(nl, dtype=np.int64)
            level = np.array(lv, dtype=np.int64)
        self.parent = _frozen(parent)
        self.nu = _frozen(np.asarray(nu, dtype=np.int64))
        self.level = _frozen(np.asarray(level, dtype=np.int64))
        self.labels = tuple(labels) if labels is not None else None

    # -- basic queries -------------------------------------------------

    def __len__(self) -> int:
        return len(self.parent)

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def height(self) -> int:
        """Maximum level of a vertex (the level of the tree)."""
        return int(self.level.max())

    def children(self, u: int) -> list[int]:
        nu = self.nu
        out = []
        c = u + 1
        end = u + int(nu[u])
        while c < end:
            out.append(c)
            c += int(nu[c])
        return out

    def descendants(self, u: int, strict: bool = True) -> range:
        """D(u) (``strict``) or D[u] as an index range."""
        return range(u + 1 if strict else u, u + int(self.nu[u]))

    def is_ancestor(self, a: int, u: int) -> bool:
        """True when ``u`` lies in D[a]."""
        return a <= u < a + int(self.nu[a])

    def ith_ancestor(self, u: int, i: int) -> int:
        self._check(u)
        if i < 0:
            raise ValueError("i must be non-negative")
        if i >= self.level[u]:
            return 0
        p = self.parent
        for _ in range(i):
            u = int(p[u])
        return u

    def _check(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise IndexError(f"vertex {u} out of range for tree of size {self.n}")

    @cached_property
    def _cousins(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.n
        order = np.lexsort((np.arange(n), self.level))
        lv = self.level[order]
        left = np.full(n, -1, dtype=np.int64)
        right = np.full(n, -1, dtype=np.int64)
        same = lv[1:] == lv[:-1]
        left[order[1:][same]] = order[:-1][same]
        right[order[:-1][same]] = order[1:][same]
        return _frozen(left), _frozen(right)

    @property
    def left_cousin(self) -> np.ndarray:
        """l(u) for every vertex, ``-1`` where absent."""
        return self._cousins[0]

    @property
    def right_cousin(self) -> np.ndarray:
        """r(u) for every vertex, ``-1`` where absent."""
        return self._cousins[1]

    def nearest_left_cousin(self, u: int) -> Optional[int]:
        self._check(u)
        w = int(self.left_cousin[u])
        return None if w < 0 else w

    def nearest_right_cousin(self, u: int) -> Optional[int]:
        self._check(u)
        w = int(self.right_cousin[u])
        return None if w < 0 else w

    def left_siblings(self, u: int) -> list[int]:
        if u == 0:
            return []
        return [c for c in self.children(int(self.parent[u])) if c < u]

    def vertices_at_level(self, d: int) -> np.ndarray:
        return np.nonzero(self.level == d)[0]

    def leaves(self) -> np.ndarray:
        return np.nonzero(self.nu == 1)[0]

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(1, self.n):
            yield int(self.parent[u]), u

    # -- derived trees ---------------------------------------------------

    def _relabel(self, idx: Sequence[int]) -> Optional[list]:
        if self.labels is None:
            return None
        return [self.labels[i] for i in idx]

    def prefix(self, t: int) -> "OrderedTree":
        """Induced subtree on the first ``t`` vertices in DFS preorder."""
        if not 1 <= t <= self.n:
            raise ValueError(f"prefix length {t} outside [1, {self.n}]")
        return OrderedTree(self.parent[:t].copy(), labels=self._relabel(range(t)))

    def subtree(self, u: int) -> "OrderedTree":
        """T[D[u]] re-rooted at ``u``."""
        self._check(u)
        end = u + int(self.nu[u])
        par = self.parent[u:end] - u
        par[0] = -1
        return OrderedTree(par, self.nu[u:end].copy(), self.level[u:end] - self.level[u],
                           labels=self._relabel(range(u, end)))

    def to_dict(self) -> dict:
        parents = [None] + [int(p) for p in self.parent[1:]]
        return {"n": self.n, "parents": parents,
                "children": [self.children(u) for u in range(self.n)]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrderedTree):
            return NotImplemented
        return np.array_equal(self.parent, other.parent)

    def __hash__(self) -> int:
        return hash(self.parent.tobytes())

    def __repr__(self) -> str:
        return f"OrderedTree(n={self.n}, height={self.height})"


def build_tree(parents: Sequence[Optional[int]],
               child_order: Optional[Sequence[Sequence[int]]] = None) -> OrderedTree:
    """Build an :class:`OrderedTree` from a parent list in any vertex order.

    ``child_order[u]`` fixes the left-to-right order of the children of
    ``u``; when omitted children are ordered by id.  The result is
    renumbered into DFS preorder and ``labels`` maps back to input ids.
    """
    n = len(parents)
    if n == 0:
        raise StructureError("empty tree")
    roots = [u for u, p in enumerate(parents) if p is None]
    if len(roots) != 1:
        raise StructureError(f"expected exactly one root, found {len(roots)}")
    kids: list[list[int]] = [[] for _ in range(n)]
    for u, p in enumerate(parents):
        if p is None:
            continue
        if not 0 <= p < n:
            raise StructureError(f"dangling parent reference {p} at vertex {u}")
        if p == u:
            raise StructureError(f"vertex {u} is its own parent")
        kids[p].append(u)
    if child_order is not None:
        if len(child_order) != n:
            raise StructureError("child_order must have one list per vertex")
        for u in range(n):
            if sorted(child_order[u]) != sorted(kids[u]):
                raise StructureError(f"child_order[{u}] disagrees with parents")
        kids = [list(c) for c in child_order]

    order: list[int] = []
    new_id = [-1] * n
    stack = [roots[0]]
    while stack:
        u = stack.pop()
        if new_id[u] >= 0:
            raise StructureError("cycle detected")
        new_id[u] = len(order)
        order.append(u)
        stack.extend(reversed(kids[u]))
    if len(order) != n:
        raise StructureError("structure is not connected (cycle or detached part)")
    par = [-1] + [new_id[parents[u]] for u in order[1:]]
    return OrderedTree(par, labels=order)


def tree_from_dict(d: dict) -> OrderedTree:
    if len(d["parents"]) != d["n"]:
        raise StructureError("'n' does not match the parents list")
    return build_tree(d["parents"], d.get("children"))


def tree_from_json(text: str) -> OrderedTree:
    return tree_from_dict(json.loads(text))


def path_tree(n: int) -> OrderedTree:
    return OrderedTree([-1] + list(range(n - 1)))


def perfect_binary_tree(k: int) -> OrderedTree:
    """B(k): the DFS-ordered perfect binary tree of level ``k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    parent: list[int] = []

    def grow(p: int, depth: int) -> None:
        u = len(parent)
        parent.append(p)
        if depth < k:
            grow(u, depth + 1)
            grow(u, depth + 1)

    grow(-1, 0)
    return OrderedTree(parent)


def admissible_prefix_subtree(T: OrderedTree, t: int) -> OrderedTree:
    return T.prefix(t)


def nearest_left_cousin(T: OrderedTree, u: int) -> Optional[int]:
    return T.nearest_left_cousin(u)


def nearest_right_cousin(T: OrderedTree, u: int) -> Optional[int]:
    return T.nearest_right_cousin(u)


def ith_ancestor(T: OrderedTree, u: int, i: int) -> int:
    return T.ith_ancestor(u, i)


def check_consecutive_cousins(T: OrderedTree, u_list: Sequence[int]) -> None:
    if not u_list:
        raise ValueError("need at least one vertex to merge")
    for a, b in zip(u_list, u_list[1:]):
        if T.nearest_right_cousin(a) != b:
            raise ValueError(f"r({a}) != {b}: vertices are not consecutive cousins")


def merge_subtrees(T: OrderedTree, u_list: Sequence[int]) -> tuple[OrderedTree, list[int]]:
    """Hang D[u_1], ..., D[u_t] under a fresh root.

    Returns ``(T_star, vertex_map)`` where ``vertex_map[i]`` is the vertex of
    ``T`` copied to vertex ``i`` of ``T_star``; ``vertex_map[0]`` is ``-1``
    for the new root.
    """
    u_list = [int(u) for u in u_list]
    check_consecutive_cousins(T, u_list)
    vmap = [-1]
    par = [-1]
    base_level = int(T.level[u_list[0]]) - 1
    for u in u_list:
        off = len(vmap) - u
        end = u + int(T.nu[u])
        vmap.extend(range(u, end))
        par.append(0)
        par.extend(int(T.parent[w]) + off for w in range(u + 1, end))
    par_a = np.array(par, dtype=np.int64)
    vm = np.array(vmap[1:], dtype=np.int64)
    nu = np.empty(len(vmap), dtype=np.int64)
    nu[0] = len(vmap)
    nu[1:] = T.nu[vm]
    level = np.zeros(len(vmap), dtype=np.int64)
    level[1:] = T.level[vm] - base_level
    labels = None
    if T.labels is not None:
        labels = [None] + [T.labels[w] for w in vmap[1:]]
    return OrderedTree(par_a, nu, level, labels=labels), vmap
