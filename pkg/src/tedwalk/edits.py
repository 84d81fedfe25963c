"""The four elementary edit operations on unordered trees, feasibility
enumeration, application, and an exact BFS oracle for the edit distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .tree import Tree, canonical_code, parse


class OpKind(Enum):
    ADD_LEAF = "AL"
    DEL_LEAF = "DL"
    ADD_INTERNAL = "AIN"
    DEL_INTERNAL = "DIN"

    @property
    def is_add(self) -> bool:
        return self in (OpKind.ADD_LEAF, OpKind.ADD_INTERNAL)


@dataclass(frozen=True)
class EditOp:
    """One elementary operation; ``target`` is the vertex u the addition
    happens under, or the vertex k being deleted."""

    kind: OpKind
    target: int


class InfeasibleEditError(ValueError):
    """The operation violates a feasibility rule on this tree."""


@dataclass(frozen=True)
class OpSets:
    """Feasible operations by kind, each list sorted by target vertex id."""

    al: tuple[EditOp, ...]
    dl: tuple[EditOp, ...]
    ain: tuple[EditOp, ...]
    din: tuple[EditOp, ...]

    @property
    def adds(self) -> tuple[EditOp, ...]:
        return self.al + self.ain

    @property
    def deletes(self) -> tuple[EditOp, ...]:
        return self.dl + self.din

    @property
    def all(self) -> tuple[EditOp, ...]:
        return self.al + self.dl + self.ain + self.din


def enumerate_ops(t: Tree) -> OpSets:
    """All feasible operations on t.

    Cardinalities: |al| = size, |dl| = number of non-root leaves,
    |ain| = number of internal vertices, |din| = number of non-leaf
    single children.  Iteration over t.vertices() is already sorted by id.
    """
    al = []
    dl = []
    ain = []
    din = []
    root = t.root
    for v in t.vertices():
        al.append(EditOp(OpKind.ADD_LEAF, v))
        if t.is_leaf(v):
            if v != root:
                dl.append(EditOp(OpKind.DEL_LEAF, v))
        else:
            ain.append(EditOp(OpKind.ADD_INTERNAL, v))
            if v != root and len(t.children[t.parent[v]]) == 1:
                din.append(EditOp(OpKind.DEL_INTERNAL, v))
    return OpSets(tuple(al), tuple(dl), tuple(ain), tuple(din))


def infeasibility(t: Tree, op: EditOp) -> str | None:
    """None if op is feasible on t, else the violated rule."""
    v = op.target
    if v not in t.parent:
        return f"vertex {v} does not exist"
    kind = op.kind
    if kind is OpKind.ADD_LEAF:
        return None
    if kind is OpKind.DEL_LEAF:
        if not t.is_leaf(v):
            return f"vertex {v} is not a leaf"
        if v == t.root:
            return "the root cannot be deleted"
        return None
    if kind is OpKind.ADD_INTERNAL:
        if t.is_leaf(v):
            return f"vertex {v} is a leaf; adding an internal node under it is an add-leaf"
        return None
    # DEL_INTERNAL
    if t.is_leaf(v):
        return f"vertex {v} is a leaf, not an internal node"
    if v == t.root:
        return "the root cannot be deleted"
    if len(t.children[t.parent[v]]) != 1:
        return f"vertex {v} is not the unique child of its parent"
    return None


def apply(t: Tree, op: EditOp) -> tuple[Tree, int]:
    """Apply op to a copy of t; returns (edited tree, edited vertex id).

    The id is the freshly created vertex for additions and the removed
    vertex's id for deletions.  Untouched vertices keep their ids.
    """
    reason = infeasibility(t, op)
    if reason is not None:
        raise InfeasibleEditError(f"{op.kind.value} on {op.target}: {reason}")
    out = t.copy()
    if op.kind is OpKind.ADD_LEAF:
        return out, out.add_leaf(op.target)
    if op.kind is OpKind.ADD_INTERNAL:
        return out, out.add_internal(op.target)
    if op.kind is OpKind.DEL_LEAF:
        out.delete_leaf(op.target)
    else:
        out.delete_internal(op.target)
    return out, op.target


class OracleCapExceeded(RuntimeError):
    """The BFS oracle exhausted its radius cap without connecting."""


@lru_cache(maxsize=None)
def _neighbor_codes(code: str) -> frozenset[str]:
    t = parse(code)
    out = set()
    for op in enumerate_ops(t).all:
        t2, _ = apply(t, op)
        out.add(canonical_code(t2))
    return frozenset(out)


def oracle_distance(a: Tree, b: Tree, radius_cap: int) -> int:
    """Exact minimum number of operations turning a into a tree isomorphic
    to b, by bidirectional BFS over canonical codes.

    Intended for small trees (sizes <= 8).  Raises OracleCapExceeded rather
    than ever returning a wrong answer when the cap is too small.
    """
    start = canonical_code(a)
    goal = canonical_code(b)
    if start == goal:
        return 0
    dist_a: dict[str, int] = {start: 0}
    dist_b: dict[str, int] = {goal: 0}
    frontier_a = [start]
    frontier_b = [goal]
    ra = rb = 0
    best = None
    while True:
        if best is not None and best <= ra + rb + 1:
            return best
        if ra + rb >= radius_cap:
            raise OracleCapExceeded(
                f"no path of length <= {radius_cap} between the trees"
            )
        # expand the smaller frontier one full level
        if len(frontier_a) <= len(frontier_b):
            seen, other, frontier = dist_a, dist_b, frontier_a
            ra += 1
            depth = ra
        else:
            seen, other, frontier = dist_b, dist_a, frontier_b
            rb += 1
            depth = rb
        nxt = []
        for code in frontier:
            for nb in _neighbor_codes(code):
                if nb in seen:
                    continue
                seen[nb] = depth
                nxt.append(nb)
                if nb in other:
                    total = depth + other[nb]
                    if best is None or total < best:
                        best = total
        if seen is dist_a:
            frontier_a = nxt
        else:
            frontier_b = nxt
        if not nxt and best is None:
            raise OracleCapExceeded("search space exhausted without a path")
