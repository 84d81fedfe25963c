"""Incremental maintenance of the distance table along a walk.

After one elementary edit of the current tree at vertex k, only the rows
against k and against the ancestors of k can change.  Each edit kind has
its own update recipe; the forest mappings involved are patched with the
flow repairs (problem B) and re-optimized from their previous flow
(problem A) instead of being rebuilt, which is what makes a step cost a
sliver of a full recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import flow
from .distance import (
    DistanceState,
    PairInfo,
    finish_pair,
    forced_mapping_cost,
    full_distance,
    lazy_pair,
)
from .edits import EditOp, InfeasibleEditError, OpKind, infeasibility
from .tree import Tree


@dataclass(frozen=True)
class Mismatch:
    """First divergence found between the tracker table and a recomputation."""

    v: int
    w: int
    field: str
    got: int | None
    want: int | None


class TrackerDivergence(RuntimeError):
    def __init__(self, step: int, op: EditOp, mismatch: Mismatch):
        super().__init__(
            f"step {step} ({op.kind.value} on {op.target}): "
            f"{mismatch.field} at pair ({mismatch.v},{mismatch.w}) "
            f"is {mismatch.got}, full recomputation gives {mismatch.want}"
        )
        self.step = step
        self.op = op
        self.mismatch = mismatch


class Tracker:
    """Distance state of a walk plus its step counter and edit log.

    ``verify_every`` > 0 shadow-recomputes the table from scratch every N
    steps and raises TrackerDivergence on any difference.  With
    ``collect_stats`` each step records the touched pairs and per-pair
    (pivots, supply) for the work-bound tests.
    """

    def __init__(self, state: DistanceState, verify_every: int = 0, collect_stats: bool = False):
        self.state = state
        self.step = 0
        self.log: list[EditOp] = []
        self.verify_every = verify_every
        self.collect_stats = collect_stats
        self.last_touched: set[tuple[int, int]] = set()
        self.last_solves: list[tuple[int, int]] = []
        self._skip_repair = False  # fault-injection hook for cmd_verify

    @property
    def origin(self) -> Tree:
        return self.state.origin

    @property
    def current(self) -> Tree:
        return self.state.current

    @property
    def distance(self) -> int:
        return self.state.distance


def new_tracker(t0: Tree, start: Tree, verify_every: int = 0, collect_stats: bool = False) -> Tracker:
    return Tracker(full_distance(t0, start), verify_every, collect_stats)


def apply_edit(tr: Tracker, op: EditOp) -> int:
    """Advance the current tree by op and patch the distance table.

    Returns the new distance between the origin and the current tree.
    """
    state = tr.state
    t = state.current
    reason = infeasibility(t, op)
    if reason is not None:
        raise InfeasibleEditError(f"{op.kind.value} on {op.target}: {reason}")
    if tr.collect_stats:
        tr.last_touched = set()
        tr.last_solves = []
    sizeh = state.sizeh
    kind = op.kind

    if kind is OpKind.ADD_LEAF:
        u = op.target
        k = t.add_leaf(u)
        sizeh[k] = 1
        sizeh[u] += 1
        for a in t.ancestors(u):
            sizeh[a] += 1
        _set_leaf_column(tr, k)
        _parent_add_leaf(tr, u, k)
        _ancestor_chain(tr, u)
    elif kind is OpKind.DEL_LEAF:
        k = op.target
        u = t.parent[k]
        t.delete_leaf(k)
        del sizeh[k]
        sizeh[u] -= 1
        for a in t.ancestors(u):
            sizeh[a] -= 1
        _drop_column(tr, k)
        _parent_del_leaf(tr, u, k)
        _ancestor_chain(tr, u)
    elif kind is OpKind.ADD_INTERNAL:
        u = op.target
        k = t.add_internal(u)
        sizeh[k] = sizeh[u]
        sizeh[u] += 1
        for a in t.ancestors(u):
            sizeh[a] += 1
        _move_column(tr, u, k)
        _parent_add_internal(tr, u, k)
        _ancestor_chain(tr, u)
    else:  # DEL_INTERNAL
        k = op.target
        u = t.parent[k]
        t.delete_internal(k)
        del sizeh[k]
        sizeh[u] -= 1
        for a in t.ancestors(u):
            sizeh[a] -= 1
        _move_column(tr, k, u)
        _ancestor_chain(tr, u)

    tr.step += 1
    tr.log.append(op)
    if tr.verify_every and tr.step % tr.verify_every == 0:
        mismatch = verify(tr)
        if mismatch is not None:
            raise TrackerDivergence(tr.step, op, mismatch)
    return state.distance


def verify(tr: Tracker) -> Mismatch | None:
    """Recompute everything from scratch and report the first differing
    table entry, or None when the tracker is exact."""
    fresh = full_distance(tr.state.origin, tr.state.current)
    table = tr.state.table
    for key in sorted(fresh.table):
        mine = table.get(key)
        want = fresh.table[key]
        if mine is None:
            return Mismatch(key[0], key[1], "d", None, want.d)
        if mine.d != want.d:
            return Mismatch(key[0], key[1], "d", mine.d, want.d)
        if mine.df != want.df:
            return Mismatch(key[0], key[1], "df", mine.df, want.df)
    for key in sorted(table):
        if key not in fresh.table:
            return Mismatch(key[0], key[1], "d", table[key].d, None)
    return None


def _note(tr: Tracker, v: int, w: int, g: flow.MatchingGraph | None = None) -> None:
    tr.last_touched.add((v, w))
    if g is not None:
        tr.last_solves.append((g.last_flow_pivots, g.supply))


def _set_leaf_column(tr: Tracker, k: int) -> None:
    """Rows against a freshly inserted leaf come from the analytic
    leaf-prototype values D(v, leaf) = D_F(v, leaf) = |subtree of v| - 1."""
    state = tr.state
    table = state.table
    stats = tr.collect_stats
    for v in state.post0:
        val = state.size0[v] - 1
        table[(v, k)] = PairInfo(val, val)
        if stats:
            tr.last_touched.add((v, k))


def _drop_column(tr: Tracker, k: int) -> None:
    state = tr.state
    for v in state.post0:
        del state.table[(v, k)]
        if tr.collect_stats:
            tr.last_touched.add((v, k))


def _move_column(tr: Tracker, src: int, dst: int) -> None:
    """Transplant all rows from column src to column dst.

    Internal insertion hands the old parent column to the new vertex;
    internal deletion hands the deleted vertex's column to its parent.  The
    forests involved are identical, so no re-evaluation is needed.
    """
    state = tr.state
    table = state.table
    for v in state.post0:
        table[(v, dst)] = table.pop((v, src))
        if tr.collect_stats:
            tr.last_touched.add((v, src))
            tr.last_touched.add((v, dst))


def _parent_add_leaf(tr: Tracker, u: int, k: int) -> None:
    """Level Parent(k) after a leaf insertion: the forest gained the
    one-vertex subtree k, so repair the mapping (problem B) and re-optimize
    (problem A)."""
    state = tr.state
    table = state.table
    chw = tuple(sorted(state.current.children[u]))
    val_leaf_v = state.sizeh[u] - 1
    m = len(chw)
    for v in state.post0:
        chv = state.children0[v]
        info = table[(v, u)]
        if not chv:
            info.d = val_leaf_v
            info.df = val_leaf_v
            if tr.collect_stats:
                _note(tr, v, u)
            continue
        if tr._skip_repair:
            continue
        if info.graph is not None and len(chv) >= 2 and m >= 3:
            g = info.graph
            column = [state.size0[vi] - 1 for vi in chv]
            info.right_node[k] = flow.repair_insert(g, column, 1)
            dfm = flow.solve(g, warm=True, check=False)
            state.flow_pivots += g.last_pivots
            info.dfm = dfm
            info.d, info.df = finish_pair(state, v, u, chw, dfm)
            if tr.collect_stats:
                _note(tr, v, u, g)
        else:
            # forced or freshly non-trivial mapping: rebuild by policy
            table[(v, u)] = info = lazy_pair(state, v, u, chw)
            if tr.collect_stats:
                _note(tr, v, u, info.graph)


def _parent_del_leaf(tr: Tracker, u: int, k: int) -> None:
    """Level Parent(k) after a leaf deletion: subtract the subtree k from
    the forest mapping and re-optimize."""
    state = tr.state
    table = state.table
    chw = tuple(sorted(state.current.children[u]))
    val_leaf_v = state.sizeh[u] - 1
    m = len(chw)
    for v in state.post0:
        chv = state.children0[v]
        info = table[(v, u)]
        if not chv:
            info.d = val_leaf_v
            info.df = val_leaf_v
            if tr.collect_stats:
                _note(tr, v, u)
            continue
        if tr._skip_repair:
            continue
        if info.graph is not None and len(chv) >= 2 and m >= 2:
            g = info.graph
            flow.repair_delete(g, info.right_node.pop(k))
            dfm = flow.solve(g, warm=True, check=False)
            state.flow_pivots += g.last_pivots
            info.dfm = dfm
            info.d, info.df = finish_pair(state, v, u, chw, dfm)
            if tr.collect_stats:
                _note(tr, v, u, g)
        else:
            table[(v, u)] = info = lazy_pair(state, v, u, chw)
            if tr.collect_stats:
                _note(tr, v, u, info.graph)


def _parent_add_internal(tr: Tracker, u: int, k: int) -> None:
    """Level Parent(k) after an internal insertion: the forest of u was
    reset and now holds exactly the subtree k, so the one-column mapping is
    rebuilt from the freshly moved rows against k."""
    state = tr.state
    chw = (k,)
    for v in state.post0:
        state.table[(v, u)] = info = lazy_pair(state, v, u, chw)
        if tr.collect_stats:
            _note(tr, v, u, info.graph)


def _ancestor_chain(tr: Tracker, u: int) -> None:
    """Problem A at every ancestor of Parent(k), bottom-up: only the cost
    column of the path child changed, warm-start from the previous flow."""
    state = tr.state
    n = u
    for w in state.current.ancestors(u):
        _problem_a_level(tr, w, n)
        n = w


def _problem_a_level(tr: Tracker, w: int, n: int) -> None:
    state = tr.state
    table = state.table
    chw = tuple(sorted(state.current.children[w]))
    val_leaf_v = state.sizeh[w] - 1
    size_n = state.sizeh[n]
    forced = len(chw) == 1
    for v in state.post0:
        chv = state.children0[v]
        info = table[(v, w)]
        if not chv:
            info.d = val_leaf_v
            info.df = val_leaf_v
            if tr.collect_stats:
                _note(tr, v, w)
            continue
        g = info.graph
        if g is not None and (forced or len(chv) == 1):
            # demote to the closed form: forced mappings never pivot
            info.graph = g = None
            info.right_node = None
        if g is None:
            info.dfm = dfm = forced_mapping_cost(state, v, chw)
        else:
            node = info.right_node[n]
            column = [table[(vi, n)].d for vi in chv]
            dfm = flow.reprice_right(g, node, column, size_n, info.dfm)
            if dfm is None:
                dfm = flow.solve(g, warm=True, check=False)
                state.flow_pivots += g.last_pivots
            info.dfm = dfm
        info.d, info.df = finish_pair(state, v, w, chw, dfm)
        if tr.collect_stats:
            _note(tr, v, w, g)
