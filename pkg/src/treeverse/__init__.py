"""Sparse universal graphs for trees, forests and bounded-treewidth graphs."""

from .embedder import Embedding, EmbeddingError, PreconditionError, embed, embed_with_trace, validate_embedding
from .graph_gen import GeneratedGraph, generate, generate_legacy
from .ks_trees import BudgetError, build_Tk, prefix_universal_graph, tk_size
from .tree_core import OrderedTree, StructureError, build_tree, perfect_binary_tree, tree_from_dict
from .treewidth import TreeDecomposition, build_universal_tw, embed_tw, normalize_decomposition

__all__ = [
    "BudgetError", "Embedding", "EmbeddingError", "GeneratedGraph", "OrderedTree",
    "PreconditionError", "StructureError", "TreeDecomposition", "build_Tk", "build_tree",
    "build_universal_tw", "embed", "embed_tw", "embed_with_trace", "generate",
    "generate_legacy", "normalize_decomposition", "perfect_binary_tree",
    "prefix_universal_graph", "tk_size", "tree_from_dict", "validate_embedding",
]
