"""Component-splitting lemmas on forests.

A forest is an adjacency mapping ``{vertex: set(neighbours)}``.  All
routines accept an optional ``vertices`` argument restricting attention to
an induced subforest, so callers never need to copy adjacency.

Determinism: candidate components are ranked by decreasing size, ties broken
by the smallest vertex id they contain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

Forest = Mapping[int, Iterable[int]]


class SplitError(ValueError):
    """A splitting routine was called outside its preconditions."""


def components(adj: Forest, vertices: Iterable[int]) -> list[frozenset[int]]:
    """Connected components of ``adj`` induced on ``vertices``, sorted by min id."""
    left = set(vertices)
    out = []
    for s in sorted(left):
        if s not in left:
            continue
        left.discard(s)
        comp = [s]
        stack = [s]
        while stack:
            a = stack.pop()
            for b in adj[a]:
                if b in left:
                    left.discard(b)
                    comp.append(b)
                    stack.append(b)
        out.append(frozenset(comp))
    return out


def _rank(c: frozenset[int]) -> tuple[int, int]:
    return (-len(c), min(c))


@dataclass(frozen=True)
class ComponentCollection:
    w: int
    components: tuple[frozenset[int], ...]
    kind: str  # "plain", "feasible" or "critical"
    excluded: int
    x: int
    y: Optional[int] = None
    walk: tuple[int, ...] = field(default=(), compare=False)

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.components)

    @property
    def union(self) -> frozenset[int]:
        return frozenset().union(*self.components) if self.components else frozenset()


def _select_window(cands: list[frozenset[int]], lo: int, hi: int) -> list[frozenset[int]]:
    ranked = sorted(cands, key=_rank)
    for c in ranked:
        if lo <= len(c) <= hi:
            return [c]
    chosen, total = [], 0
    for c in ranked:
        if total >= lo:
            break
        chosen.append(c)
        total += len(c)
    return chosen


def _step_into(adj: Forest, w: int, comp: frozenset[int]) -> int:
    """Neighbour of ``w`` inside ``comp``; the min id when ``comp`` is a separate tree."""
    nb = [b for b in adj[w] if b in comp]
    if len(nb) > 1:
        raise SplitError("input is not a forest")
    return nb[0] if nb else min(comp)


def find_components_window(adj: Forest, u: int, x: int,
                           vertices: Optional[Iterable[int]] = None,
                           tight: bool = False) -> ComponentCollection:
    """A cut vertex w and w-components with union size in [x, 2x-1] avoiding u.

    With ``tight=True`` (needs x >= 2) the window shrinks to [x, 2x-2]: the
    walk then also descends into components of size exactly 2x-1, whose
    remaining 2x-2 vertices still cover x.
    """
    region = frozenset(adj) if vertices is None else frozenset(vertices)
    if u not in region:
        raise SplitError(f"vertex {u} not in the forest")
    if x < 1 or (tight and x < 2):
        raise SplitError("x must be at least 1 (at least 2 for the tight window)")
    if len(region) < x + 1:
        raise SplitError(f"forest has {len(region)} vertices, need at least x+1 = {x + 1}")
    hi = 2 * x - 2 if tight else 2 * x - 1
    w = u
    walk = [u]
    while True:
        cands = components(adj, region - {w})
        big = [c for c in cands if len(c) > hi]
        if not big:
            chosen = _select_window(cands, x, hi)
            return ComponentCollection(w, tuple(chosen), "plain", u, x, walk=tuple(walk))
        region = min(big, key=_rank)
        w = _step_into(adj, w, region)
        walk.append(w)


def _minimal_cover(cands: list[frozenset[int]], target: int) -> list[frozenset[int]]:
    """Inclusion-minimal subfamily with total size >= target (largest first)."""
    chosen, total = [], 0
    for c in sorted(cands, key=_rank):
        if total >= target:
            break
        chosen.append(c)
        total += len(c)
    # removability only shrinks as we remove, so a single pass suffices
    for c in sorted(chosen, key=lambda c: (len(c), min(c))):
        if total - len(c) >= target:
            chosen.remove(c)
            total -= len(c)
    return chosen


def find_feasible_or_critical(adj: Forest, u: int, x: int, y: int,
                              vertices: Optional[Iterable[int]] = None) -> ComponentCollection:
    """An (x,y)-feasible or (x,y)-critical collection avoiding u (needs x > y >= 2)."""
    if not x > y >= 2:
        raise SplitError(f"need x > y >= 2, got x={x}, y={y}")
    region = frozenset(adj) if vertices is None else frozenset(vertices)
    if len(region) < x:
        raise SplitError(f"forest has {len(region)} vertices, need at least x = {x}")
    base = find_components_window(adj, u, x - 1, region)
    w, comps = base.w, list(base.components)
    walk = list(base.walk)
    while True:
        total = sum(len(c) for c in comps)
        if total <= x + y - 3:
            return ComponentCollection(w, tuple(comps), "feasible", u, x, y, tuple(walk))
        D = _minimal_cover(comps, x + y - 2)
        if len(D) >= 2:
            tot = sum(len(c) for c in D)
            smallest = min(D, key=lambda c: (len(c), -min(c)))
            if tot - len(smallest) >= x - 1:
                rest = tuple(c for c in D if c is not smallest)
                return ComponentCollection(w, rest, "feasible", u, x, y, tuple(walk))
            return ComponentCollection(w, tuple(sorted(D, key=_rank)), "critical", u, x, y, tuple(walk))
        D1 = D[0]
        w = _step_into(adj, w, D1)
        walk.append(w)
        comps = components(adj, D1 - {w})


@dataclass(frozen=True)
class Refinement:
    w_prime: int
    components: tuple[frozenset[int], ...]
    branch: str  # "a" or "b"
    ordered: tuple[frozenset[int], ...]  # C_1..C_p by increasing size
    w1: int

    @property
    def union(self) -> frozenset[int]:
        return frozenset().union(*self.components) if self.components else frozenset()


def sort_ascending(comps: Iterable[frozenset[int]]) -> list[frozenset[int]]:
    return sorted(comps, key=lambda c: (len(c), min(c)))


def critical_branch(cc: ComponentCollection, x: int, y: int) -> str:
    """"a" when z' = |T0| - x - y <= y-2, else "b"."""
    return "a" if cc.size + 1 - x - y <= y - 2 else "b"


def refine_critical(adj: Forest, cc: ComponentCollection, x: int, y: int) -> Refinement:
    """Split C_1 (the smallest component) of a critical collection further.

    Returns w' in C_1 and w'-components C' of the forest on C_1 avoiding
    w_1 (the neighbour of w in C_1) such that either
    (a) ``x <= |T0| - |C'| - 1 <= x+y-2`` or
    (b) ``x <= |C_2..C_p| + 2 + |C'| <= x+y-2``.

    Branch (b) additionally needs ``x <= 4y``: only then is the sub-window
    target at most y-1, so that a [s, 2s-1] collection fits the slack.
    """
    if cc.kind != "critical" or not critical_ok(cc.components, x, y):
        raise SplitError("refine_critical needs an (x,y)-critical collection")
    ordered = sort_ascending(cc.components)
    C1 = ordered[0]
    rest = sum(len(c) for c in ordered[1:])
    w1 = _step_into(adj, cc.w, C1)
    t0 = cc.size + 1
    zp = t0 - x - y
    branch = critical_branch(cc, x, y)
    if branch == "a":
        param = zp + 1
    else:
        if x > 4 * y:
            raise SplitError(f"branch b needs x <= 4y, got x={x}, y={y}")
        param = x - rest - 2
    if param <= 0:
        wp, cp = w1, ()
    else:
        sub = find_components_window(adj, w1, param, C1)
        wp, cp = sub.w, sub.components
    res = Refinement(wp, tuple(cp), branch, tuple(ordered), w1)
    problems = check_refinement(adj, cc, res, x, y)
    if problems:
        raise SplitError("refinement window violated: " + "; ".join(problems))
    return res


def split_smallest_component(adj: Forest, cc: ComponentCollection, x: int, y: int) -> Refinement:
    """Variant of :func:`refine_critical` for the large-z' regime.

    Finds w' in C_1 and w'-components C' of the forest on C_1, avoiding w_1,
    with ``x <= |C_2..C_p| + 1 + |C'| <= x+y-2``; unlike branch (b) of
    :func:`refine_critical` the cut vertex w is not counted, so it can stay
    with the rest of the guest.
    """
    if cc.kind != "critical" or not critical_ok(cc.components, x, y):
        raise SplitError("split_smallest_component needs an (x,y)-critical collection")
    ordered = sort_ascending(cc.components)
    C1 = ordered[0]
    rest = sum(len(c) for c in ordered[1:])
    w1 = _step_into(adj, cc.w, C1)
    s = x - 1 - rest
    if not 1 <= s <= y:
        raise SplitError(f"target {s} outside [1, {y}]: collection too unbalanced")
    sub = find_components_window(adj, w1, s, C1, tight=(s == y))
    res = Refinement(sub.w, tuple(sub.components), "b*", tuple(ordered), w1)
    problems = check_refinement(adj, cc, res, x, y)
    if problems:
        raise SplitError("refinement window violated: " + "; ".join(problems))
    return res


# ---------------------------------------------------------------------------
# certificates


def critical_ok(comps, x: int, y: int) -> bool:
    sizes = [len(c) for c in comps]
    if len(sizes) < 2:
        return False
    total = sum(sizes)
    return x + y - 2 <= total <= 2 * x - 3 and total - min(sizes) <= x - 2


def feasible_ok(comps, x: int, y: int) -> bool:
    total = sum(len(c) for c in comps) + 1
    return x <= total <= x + y - 2


def check_collection(adj: Forest, cc: ComponentCollection,
                     vertices: Optional[Iterable[int]] = None) -> list[str]:
    """Violations of a collection's definition (empty list when valid)."""
    region = frozenset(adj) if vertices is None else frozenset(vertices)
    problems = []
    true_comps = set(components(adj, region - {cc.w}))
    seen: set[int] = set()
    for c in cc.components:
        if c not in true_comps:
            problems.append(f"{sorted(c)[:5]}... is not a component of the forest minus {cc.w}")
        if seen & c:
            problems.append("components overlap")
        seen |= c
    if cc.excluded in seen:
        problems.append(f"excluded vertex {cc.excluded} covered")
    if cc.w in seen:
        problems.append("cut vertex inside a component")
    size = len(seen)
    if cc.kind == "plain":
        if not cc.x <= size <= 2 * cc.x - 1:
            problems.append(f"size {size} outside [{cc.x}, {2 * cc.x - 1}]")
    elif cc.kind == "feasible":
        if not feasible_ok(cc.components, cc.x, cc.y):
            problems.append(f"size {size}+1 outside [{cc.x}, {cc.x + cc.y - 2}]")
    elif cc.kind == "critical":
        if not critical_ok(cc.components, cc.x, cc.y):
            problems.append("critical window or proper-subset bound violated")
        if any(len(c) < cc.y for c in cc.components):
            problems.append("critical component smaller than y")
    else:
        problems.append(f"unknown kind {cc.kind}")
    return problems


def check_refinement(adj: Forest, cc: ComponentCollection, r: Refinement, x: int, y: int) -> list[str]:
    problems = []
    C1 = r.ordered[0]
    if r.w_prime not in C1:
        problems.append("w' not in C_1")
    cu = r.union
    if r.w1 in cu:
        problems.append("w_1 covered by C'")
    true_comps = set(components(adj, C1 - {r.w_prime}))
    for c in r.components:
        if c not in true_comps:
            problems.append("C' member is not a w'-component of C_1")
    t0 = cc.size + 1
    rest = sum(len(c) for c in r.ordered[1:])
    if r.branch == "a":
        val = t0 - len(cu) - 1
    elif r.branch == "b":
        val = rest + 2 + len(cu)
    else:
        val = rest + 1 + len(cu)
    if not x <= val <= x + y - 2:
        problems.append(f"branch {r.branch} size {val} outside [{x}, {x + y - 2}]")
    return problems
