"""Timing harness comparing a from-scratch distance computation against one
incremental update, after a single edit of the second tree.

For every tree size and edit kind: draw a random pre-distanced pair, pick a
random feasible operation of that kind on the second tree, then time (a)
one tracker update and (b) one full recomputation on the edited tree.
Absolute times are hardware-bound and only reported; ratios and their
ordering across sizes are the meaningful output.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from . import walk
from .distance import full_distance
from .edits import OpKind, apply, enumerate_ops
from .incremental import Tracker, apply_edit


@dataclass
class BenchRow:
    size: int
    op: str  # AL/DL/AIN/DIN or "all"
    trials: int
    t_full: float  # mean seconds
    t_incremental: float

    @property
    def ratio(self) -> float:
        return self.t_full / self.t_incremental


def _ops_of_kind(t, kind: OpKind):
    sets = enumerate_ops(t)
    return {
        OpKind.ADD_LEAF: sets.al,
        OpKind.DEL_LEAF: sets.dl,
        OpKind.ADD_INTERNAL: sets.ain,
        OpKind.DEL_INTERNAL: sets.din,
    }[kind]


def run_bench(sizes: list[int], trials: int, seed: int) -> list[BenchRow]:
    """Per (size, op kind) mean times plus an all-ops aggregate per size."""
    rows: list[BenchRow] = []
    for size_idx, n in enumerate(sizes):
        per_kind: dict[OpKind, list[tuple[float, float]]] = {k: [] for k in OpKind}
        for trial in range(trials):
            rng = walk.rng_stream(seed, size_idx * trials + trial)
            t_a = walk.initial_tree(n, rng)
            t_b = walk.initial_tree(n, rng)
            for kind in OpKind:
                pool = _ops_of_kind(t_b, kind)
                if not pool:
                    continue
                op = pool[rng.integers(len(pool))]
                tracker = Tracker(full_distance(t_a, t_b))
                start = time.perf_counter()
                apply_edit(tracker, op)
                t_incr = time.perf_counter() - start
                edited, _ = apply(t_b, op)
                start = time.perf_counter()
                full_distance(t_a, edited)
                t_full = time.perf_counter() - start
                per_kind[kind].append((t_full, t_incr))
        all_pairs: list[tuple[float, float]] = []
        for kind in OpKind:
            pairs = per_kind[kind]
            if not pairs:
                continue
            all_pairs.extend(pairs)
            rows.append(
                BenchRow(
                    n,
                    kind.value,
                    len(pairs),
                    sum(p[0] for p in pairs) / len(pairs),
                    sum(p[1] for p in pairs) / len(pairs),
                )
            )
        rows.append(
            BenchRow(
                n,
                "all",
                len(all_pairs),
                sum(p[0] for p in all_pairs) / len(all_pairs),
                sum(p[1] for p in all_pairs) / len(all_pairs),
            )
        )
    return rows
