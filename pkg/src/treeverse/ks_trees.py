"""(K,s)-trees, the T_k family and the prefix universal graph."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .graph_gen import GeneratedGraph, generate
from .tree_core import OrderedTree

DEFAULT_MAX_K = 8


class BudgetError(ValueError):
    """Requested construction exceeds the configured size cap."""


def max_k_budget() -> int:
    raw = os.environ.get("TREEVERSE_MAX_K")
    return int(raw) if raw else DEFAULT_MAX_K


@dataclass(frozen=True)
class TypedTree:
    tree: OrderedTree
    vtype: np.ndarray
    k: int


@lru_cache(maxsize=None)
def a_table(k: int) -> dict[tuple[int, int], int]:
    """Subtree sizes a[(level, type)] of T_k from the top-down recurrence."""
    if k < 0:
        raise ValueError("k must be non-negative")
    a = {(k, 1): 1, (k, 2): 1}
    for ell in range(k - 1, -1, -1):
        a[(ell, 1)] = a[(ell + 1, 2)] + 1
        a[(ell, 2)] = 4 * a[(ell + 1, 1)] + 3 * a[(ell + 1, 2)] + 1
    return a


def tk_size(k: int) -> int:
    return a_table(k)[(0, 1)]


CHILD_TYPES = {1: (2,), 2: (1, 2, 1, 2, 1, 2, 1)}


@lru_cache(maxsize=16)
def _build_tk_cached(k: int) -> TypedTree:
    a = a_table(k)
    n = a[(0, 1)]
    parent = np.empty(n, dtype=np.int64)
    level = np.empty(n, dtype=np.int64)
    vtype = np.empty(n, dtype=np.int8)
    nu = np.empty(n, dtype=np.int64)
    # DFS preorder: a stack of (parent, level, type) in reverse child order
    stack = [(-1, 0, 1)]
    i = 0
    while stack:
        p, lv, ty = stack.pop()
        parent[i], level[i], vtype[i], nu[i] = p, lv, ty, a[(lv, ty)]
        if lv < k:
            for ct in reversed(CHILD_TYPES[ty]):
                stack.append((i, lv + 1, ct))
        i += 1
    assert i == n
    vtype.setflags(write=False)
    return TypedTree(OrderedTree(parent, nu, level), vtype, k)


def build_Tk(k: int, max_k: Optional[int] = None) -> TypedTree:
    """T_k with vertex types; ``max_k`` defaults to ``TREEVERSE_MAX_K`` (8)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    cap = max_k_budget() if max_k is None else max_k
    if k > cap:
        raise BudgetError(f"k={k} exceeds the size cap {cap} (set TREEVERSE_MAX_K to raise it)")
    return _build_tk_cached(k)


def nu_consistency(tt: TypedTree) -> bool:
    """ν of the built tree agrees with the recurrence (independent derivation)."""
    T = tt.tree
    nu = np.ones(T.n, dtype=np.int64)
    par = T.parent
    for u in range(T.n - 1, 0, -1):
        nu[par[u]] += nu[u]
    a = a_table(tt.k)
    expect = np.array([a[(int(l), int(p))] for l, p in zip(T.level, tt.vtype)], dtype=np.int64)
    return bool(np.array_equal(nu, expect) and np.array_equal(nu, T.nu))


# ---------------------------------------------------------------------------
# (K, s)-tree predicate


def is_ks_tree(T: OrderedTree, K: int, s: int) -> tuple[bool, Optional[tuple[int, str]]]:
    """Check T1-T4 at every vertex; returns ``(ok, (vertex, rule) | None)``.

    The reported violation is the smallest vertex id failing any rule, with
    rules tried in order T1..T4 at that vertex.
    """
    nu, lv = T.nu, T.level
    lc, rc = T.left_cousin, T.right_cousin
    n = T.n
    bad = np.zeros((4, n), dtype=bool)

    has_l = lc >= 0
    l_nu = np.where(has_l, nu[np.maximum(lc, 0)], 0)
    ll = np.where(has_l, lc[np.maximum(lc, 0)], -1)
    has_ll = ll >= 0
    ll_nu = np.where(has_ll, nu[np.maximum(ll, 0)], 0)
    bad[0] = has_ll & (ll_nu + l_nu < nu)
    bad[1] = has_l & (K * l_nu < nu)

    # T3 via the suffix maximum of ν over levels >= L(u) + s
    H = T.height
    level_max = np.zeros(H + 2, dtype=np.int64)
    np.maximum.at(level_max, lv, nu)
    suffix = np.maximum.accumulate(level_max[::-1])[::-1]
    tgt = lv + s
    bound = np.where(tgt <= H, suffix[np.minimum(np.maximum(tgt, 0), H + 1)], 0)
    bad[2] = (rc >= 0) & (nu < bound)

    has_child = nu > 1
    bad[3] = has_child & has_l & (l_nu == 1)

    any_bad = bad.any(axis=0)
    if not any_bad.any():
        return True, None
    u = int(np.argmax(any_bad))
    rule = f"T{int(np.argmax(bad[:, u])) + 1}"
    return False, (u, rule)


# ---------------------------------------------------------------------------
# R1-R4


def level_type_sequences(k: int) -> list[np.ndarray]:
    """Left-to-right vertex types on each level of T_k, without building T_k."""
    seqs = [np.array([1], dtype=np.int8)]
    reps = np.array([0, 1, 7])
    pattern2 = np.array(CHILD_TYPES[2], dtype=np.int8)
    for _ in range(k):
        cur = seqs[-1]
        counts = reps[cur]
        nxt = np.empty(int(counts.sum()), dtype=np.int8)
        starts = np.cumsum(counts) - counts
        one = cur == 1
        nxt[starts[one]] = 2
        s2 = starts[~one]
        for j in range(7):
            nxt[s2 + j] = pattern2[j]
        seqs.append(nxt)
    return seqs


def check_R_properties(k: int) -> dict:
    """Verify R1-R4 and the size window of R3 exactly; returns a report dict."""
    a = a_table(k)
    failures: list[str] = []

    for ell in range(k + 1):
        a1, a2 = a[(ell, 1)], a[(ell, 2)]
        if ell == k:
            ok = a1 == a2 == 1
        elif (k - ell) % 2 == 0:
            ok = a2 - 1 == 4 * (a1 - 1)
        else:
            ok = a2 == 4 * a1
        if not (ok and 4 * a1 - 3 <= a2 <= 4 * a1):
            failures.append(f"R1 at level {ell}")

    seqs = level_type_sequences(k)
    for ell, seq in enumerate(seqs):
        first = 1 if ell % 2 == 0 else 2
        other = 3 - first
        ok = len(seq) % 2 == 1 and seq[0] == first and seq[-1] == first
        ok = ok and bool((seq[0::2] == first).all() and (seq[1::2] == other).all())
        if not ok:
            failures.append(f"R2 at level {ell}")
    total = sum(len(s) for s in seqs)
    if total != a[(0, 1)]:
        failures.append("level sequences disagree with |T_k|")

    if k >= 2:
        if tk_size(k) != 4 * tk_size(k - 2) + 3 * tk_size(k - 1) - 1:
            failures.append("R3 recurrence")
        size = tk_size(k)
        # 1/2 + 2^(2k-1) <= |T_k| <= 2^(2k+1) - 1, doubled to stay integral
        if not (1 + 2 ** (2 * k) <= 2 * size and size <= 2 ** (2 * k + 1) - 1):
            failures.append("R3 size window")
    # k <= 1/2 + 1/2 log2 |T_k|  <=>  2^(2k-1) <= |T_k|
    if 2 * k - 1 >= 0 and 2 ** (2 * k - 1) > tk_size(k):
        failures.append("R3 level bound")

    for ell in range(1, k + 1):
        if sum(a[(j, 1)] for j in range(ell, k + 1)) > 2 * a[(ell, 1)]:
            failures.append(f"R4 at level {ell}")

    return {"k": k, "ok": not failures, "failures": failures, "size": tk_size(k)}


# ---------------------------------------------------------------------------
# bounds


def bound_holds(count: int, n: int, lin: int, num: int = 14, den: int = 5) -> bool:
    """Exact test of ``count <= (num/den) n log2 n + lin n`` in integers."""
    if n <= 0:
        raise ValueError("n must be positive")
    lhs = den * (count - lin * n)
    if lhs <= 0:
        return True
    if n == 1:
        return False
    # lhs <= num*n*log2(n)  <=>  2^lhs <= n^(num*n)
    return lhs <= (n ** (num * n)).bit_length() - 1


def bound_value(n: int, lin: int, num: int = 14, den: int = 5) -> float:
    return num / den * n * math.log2(n) + lin * n if n > 1 else float(lin * n)


def minimal_k(n: int) -> int:
    if n < 1:
        raise ValueError("n must be at least 1")
    k = 0
    while tk_size(k) < n:
        k += 1
    return k


def prefix_universal_graph(n: int, max_k: Optional[int] = None) -> GeneratedGraph:
    """G²_{T_k}[U] for the admissible prefix U of size n, k minimal.

    The graph is generated directly on the prefix tree T_k[U], which yields
    the same edge set as inducing G²_{T_k} on U.
    """
    k = minimal_k(n)
    tt = build_Tk(k, max_k=max_k)
    base = tt.tree.prefix(n) if n < tt.tree.n else tt.tree
    G = generate(base, 2)
    G.name = f"G^2_T{k}[{n}]"
    G.meta.update({"k": k, "n": n, "tk_size": tt.tree.n})
    return G


def graph_stats(G: GeneratedGraph, k: int, lin: int = 600) -> dict:
    n = G.n
    return {
        "n": n,
        "k": k,
        "vertices": n,
        "edges": G.num_edges,
        "arcs": G.num_arcs,
        "bound_14_5": bound_value(n, lin),
        "bound_holds": bound_holds(G.num_edges, n, lin),
    }


# ---------------------------------------------------------------------------
# one-per-level law for prefixes


def unsaturated_level_counts(T: OrderedTree) -> np.ndarray:
    """Max over prefix sizes t of the per-level size of U \\ D[X].

    For U = range(t), a vertex x < t lies outside D[X] exactly when its
    subtree sticks out of U, i.e. ``x + ν(x) > t``.  Returns, per level, the
    maximum count over all t in [1, n].
    """
    n = T.n
    nu, lv = T.nu, T.level
    H = T.height
    worst = np.zeros(H + 1, dtype=np.int64)
    # x contributes to every t in (x, x + ν(x)) : a difference array per level
    diff = np.zeros((H + 1, n + 2), dtype=np.int64)
    start = np.arange(n) + 1
    stop = np.arange(n) + nu
    live = stop > start
    np.add.at(diff, (lv[live], start[live]), 1)
    np.add.at(diff, (lv[live], stop[live]), -1)
    counts = np.cumsum(diff, axis=1)[:, 1:n + 1]
    worst = counts.max(axis=1)
    return worst


def unsaturated_set_literal(T: OrderedTree, t: int) -> list[int]:
    """U \\ D[X] straight from the definition (slow; for cross-checking)."""
    U = set(range(t))

    def inside(x: int) -> bool:
        return all(w in U for w in T.descendants(x, strict=False))

    X = [x for x in U if inside(x) and (x == 0 or not inside(int(T.parent[x])))]
    DX = set()
    for x in X:
        DX.update(T.descendants(x, strict=False))
    return sorted(U - DX)
