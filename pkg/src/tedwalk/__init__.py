"""Incremental constrained edit distance on unordered trees and a
random-walk laboratory on tree space."""

from .tree import (
    Tree,
    TreeParseError,
    canonical_code,
    enumerate_trees,
    height,
    outdegree,
    parse,
    size,
    strahler,
    subtree_sizes,
    tree_stats,
)
from .edits import EditOp, InfeasibleEditError, OpKind, apply, enumerate_ops, oracle_distance
from .distance import DistanceState, complexity_probe, distance, full_distance
from .incremental import Tracker, apply_edit, new_tracker, verify

__version__ = "0.1.0"

__all__ = [
    "Tree",
    "TreeParseError",
    "canonical_code",
    "enumerate_trees",
    "height",
    "outdegree",
    "parse",
    "size",
    "strahler",
    "subtree_sizes",
    "tree_stats",
    "EditOp",
    "InfeasibleEditError",
    "OpKind",
    "apply",
    "enumerate_ops",
    "oracle_distance",
    "DistanceState",
    "complexity_probe",
    "distance",
    "full_distance",
    "Tracker",
    "apply_edit",
    "new_tracker",
    "verify",
    "__version__",
]
