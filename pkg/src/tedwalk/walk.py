"""Random walks on tree space with trajectory recording.

The balanced kernel draws an adding operation with probability 1/2
(uniform over add-leaf and add-internal targets) and a deleting operation
with probability 1/2 (uniform over the delete targets); when nothing can
be deleted the add branch is forced, which reflects the walk at the
single-node tree.  The isotropic kernel draws uniformly over all feasible
operations.

Streams: replicate i of a run with base seed s uses the generator
PCG64(SeedSequence(s, spawn_key=(i,))), so any (seed, stream) pair yields
the same trajectory on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import incremental
from .distance import full_distance
from .edits import EditOp, OpKind, apply, enumerate_ops
from .tree import Tree, tree_stats

RNG_IDENTITY = "numpy.random.PCG64(SeedSequence(seed, spawn_key=(stream,)))"


class Kernel(Enum):
    BALANCED = "balanced"
    ISOTROPIC = "isotropic"


@dataclass(frozen=True)
class TrajectoryRecord:
    """One step of a walk: the operation that produced the tree (None at
    h = 0), its characteristics, and the distance to the origin when
    tracked."""

    h: int
    op: OpKind | None
    size: int
    height: int
    outdegree: int
    strahler: int
    dist: int | None


class InvariantViolation(AssertionError):
    """A trajectory broke a parity or size-bound law of the distance."""


def rng_stream(seed: int, stream: int = 0) -> np.random.Generator:
    """Deterministic generator for one replicate of a seeded run."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def sample_op(t: Tree, kernel: Kernel, rng: np.random.Generator) -> EditOp:
    """Draw one feasible operation from the kernel law.

    Draw order is part of the reproducibility contract: balanced draws one
    coin (skipped when the delete set is empty, the forced-add reflection)
    then one index; isotropic draws a single index.  Pools are ordered
    add-leaf, del-leaf, add-internal, del-internal, each by vertex id,
    matching enumerate_ops.
    """
    children = t.children
    parent = t.parent
    root = t.root
    verts = list(children)
    internal = [v for v in verts if children[v]]
    if kernel is Kernel.ISOTROPIC:
        dl = [v for v in verts if not children[v] and v != root]
        din = [v for v in internal if v != root and len(children[parent[v]]) == 1]
        idx = int(rng.integers(len(verts) + len(dl) + len(internal) + len(din)))
        if idx < len(verts):
            return EditOp(OpKind.ADD_LEAF, verts[idx])
        idx -= len(verts)
        if idx < len(dl):
            return EditOp(OpKind.DEL_LEAF, dl[idx])
        idx -= len(dl)
        if idx < len(internal):
            return EditOp(OpKind.ADD_INTERNAL, internal[idx])
        return EditOp(OpKind.DEL_INTERNAL, din[idx - len(internal)])
    # balanced: the delete set is non-empty iff the tree has a second
    # vertex (then some non-root leaf exists); a single node forces an add
    if len(verts) > 1 and rng.integers(2):
        dl = [v for v in verts if not children[v] and v != root]
        din = [v for v in internal if v != root and len(children[parent[v]]) == 1]
        idx = int(rng.integers(len(dl) + len(din)))
        if idx < len(dl):
            return EditOp(OpKind.DEL_LEAF, dl[idx])
        return EditOp(OpKind.DEL_INTERNAL, din[idx - len(dl)])
    idx = int(rng.integers(len(verts) + len(internal)))
    if idx < len(verts):
        return EditOp(OpKind.ADD_LEAF, verts[idx])
    return EditOp(OpKind.ADD_INTERNAL, internal[idx - len(verts)])


def step(t: Tree, kernel: Kernel, rng: np.random.Generator) -> tuple[EditOp, Tree]:
    """One move of the walk; the input tree is left untouched."""
    op = sample_op(t, kernel, rng)
    t2, _ = apply(t, op)
    return op, t2


def initial_tree(x: int, rng: np.random.Generator) -> Tree:
    """Random tree of size x grown from a single node by x - 1 draws of the
    balanced kernel's add branch."""
    if x < 1:
        raise ValueError(f"initial size must be >= 1, got {x}")
    t = Tree()
    for _ in range(x - 1):
        ops = enumerate_ops(t)
        pool = ops.adds
        op = pool[rng.integers(len(pool))]
        if op.kind is OpKind.ADD_LEAF:
            t.add_leaf(op.target)
        else:
            t.add_internal(op.target)
    return t


def _check_bounds(h: int, dist: int, size_now: int, size0: int) -> None:
    if (dist - abs(size_now - size0)) % 2:
        raise InvariantViolation(
            f"parity broken at h={h}: dist {dist}, sizes {size0} -> {size_now}"
        )
    if not abs(size_now - size0) <= dist <= size_now + size0:
        raise InvariantViolation(
            f"size bounds broken at h={h}: dist {dist}, sizes {size0} -> {size_now}"
        )


def simulate(
    t0: Tree,
    steps: int,
    kernel: Kernel,
    rng: np.random.Generator,
    distance: str = "incremental",
) -> list[TrajectoryRecord]:
    """Walk ``steps`` moves from t0 and record every state.

    ``distance`` selects the end-to-end distance engine: "incremental"
    maintains a tracker, "full" recomputes from scratch each step (the
    cross-check path), "none" skips it.  Parity and size-bound laws are
    hard-checked whenever the distance is tracked.
    """
    if distance not in ("incremental", "full", "none"):
        raise ValueError(f"unknown distance engine {distance!r}")
    size0 = t0.size
    records = [TrajectoryRecord(0, None, *tree_stats(t0), dist=0 if distance != "none" else None)]
    tracker = incremental.new_tracker(t0, t0) if distance == "incremental" else None
    t = t0.copy() if tracker is None else tracker.current
    for h in range(1, steps + 1):
        op = sample_op(t, kernel, rng)
        if tracker is not None:
            dist = incremental.apply_edit(tracker, op)
            t = tracker.current
        else:
            t, _ = apply(t, op)
            dist = full_distance(t0, t).distance if distance == "full" else None
        stats = tree_stats(t)
        if dist is not None:
            _check_bounds(h, dist, stats[0], size0)
        records.append(TrajectoryRecord(h, op.kind, *stats, dist=dist))
    return records
