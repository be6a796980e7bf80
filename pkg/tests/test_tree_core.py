from __future__ import annotations

import pytest

from treeverse.tree_core import (StructureError, build_tree, merge_subtrees, path_tree,
                                 perfect_binary_tree, tree_from_dict)
from treeverse.ks_trees import build_Tk

# B(2) in DFS order: r a c d b e f
R, A, C, D, B, E, F = range(7)


def test_path_levels_and_sizes():
    T = build_tree([None, 0, 1])
    assert T.level.tolist() == [0, 1, 2]
    assert T.nu.tolist() == [3, 2, 1]


def test_build_tree_renumbers_into_preorder():
    # root 3 with children 0 then 1; 2 hangs under 0
    T = build_tree([3, 3, 0, None], child_order=[[2], [], [], [0, 1]])
    assert T.labels == (3, 0, 2, 1)
    assert T.parent.tolist() == [-1, 0, 1, 0]


@pytest.mark.parametrize("parents", [
    [None, None],
    [None, 5],
    [None, 2, 1],
])
def test_build_tree_rejects_bad_structure(parents):
    with pytest.raises(StructureError):
        build_tree(parents)


def test_perfect_binary_dfs_order():
    T = perfect_binary_tree(2)
    assert T.n == 7
    assert T.children(R) == [A, B]
    assert T.children(A) == [C, D]
    assert (int(T.nu[R]), int(T.nu[A]), int(T.nu[B])) == (7, 3, 3)


def test_cousins():
    T = perfect_binary_tree(2)
    assert T.nearest_left_cousin(E) == D
    assert T.nearest_right_cousin(D) == E
    assert T.nearest_left_cousin(C) is None
    assert T.nearest_left_cousin(R) is None
    assert T.nearest_right_cousin(F) is None


def test_ith_ancestor_saturates_at_root():
    T = perfect_binary_tree(2)
    assert T.ith_ancestor(C, 0) == C
    assert T.ith_ancestor(C, 1) == A
    assert T.ith_ancestor(C, 5) == R


def test_prefix():
    T = build_Tk(3).tree
    assert T.prefix(1).n == 1
    assert T.prefix(T.n) == T
    P = T.prefix(11)
    assert P.n == 11 and P.parent.tolist() == T.parent[:11].tolist()


def test_merge_all_root_children_gives_same_tree():
    T = perfect_binary_tree(2)
    T_star, vmap = merge_subtrees(T, [A, B])
    assert T_star == T
    assert vmap == [-1, 1, 2, 3, 4, 5, 6]


def test_merge_grandchildren_of_tk():
    T = build_Tk(3).tree
    u = T.children(0)[0]
    kids = T.children(u)
    assert len(kids) == 7
    T_star, _ = merge_subtrees(T, kids)
    assert T_star.n == 33


def test_merge_rejects_non_consecutive():
    with pytest.raises(ValueError):
        merge_subtrees(perfect_binary_tree(2), [C, E])


def test_json_roundtrip():
    T = build_Tk(2).tree
    assert tree_from_dict(T.to_dict()) == T
    assert path_tree(4).edges() is not None
