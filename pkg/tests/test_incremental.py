import random

import pytest

from tedwalk.distance import full_distance
from tedwalk.edits import EditOp, InfeasibleEditError, OpKind, enumerate_ops
from tedwalk.incremental import TrackerDivergence, apply_edit, new_tracker, verify
from tedwalk.tree import parse


class TestNewTracker:
    def test_identity(self):
        t = parse("((())())")
        assert new_tracker(t, t).distance == 0

    def test_star_chain(self):
        assert new_tracker(parse("(()())"), parse("((()))")).distance == 2

    def test_fresh_tracker_verifies(self):
        tr = new_tracker(parse("((()))"), parse("(()())"))
        assert verify(tr) is None


class TestApplyEdit:
    def test_neighbor_distance_one(self):
        for code in ["()", "(())", "((()))", "(()())", "((())())"]:
            t = parse(code)
            tr = new_tracker(t, t)
            op = enumerate_ops(tr.current).all[0]
            assert apply_edit(tr, op) == 1

    def test_add_then_delete_restores(self):
        t = parse("((())())")
        tr = new_tracker(t, t)
        before = {k: (i.d, i.df) for k, i in tr.state.table.items()}
        k = None
        d = apply_edit(tr, EditOp(OpKind.ADD_LEAF, t.root))
        assert d == 1
        k = max(tr.current.vertices())
        assert apply_edit(tr, EditOp(OpKind.DEL_LEAF, k)) == 0
        after = {k2: (i.d, i.df) for k2, i in tr.state.table.items()}
        assert before == after

    def test_internal_insert_then_delete_restores(self):
        t = parse("((()())())")
        tr = new_tracker(t, t)
        apply_edit(tr, EditOp(OpKind.ADD_INTERNAL, t.root))
        k = max(tr.current.vertices())
        apply_edit(tr, EditOp(OpKind.DEL_INTERNAL, k))
        assert tr.distance == 0
        assert verify(tr) is None

    def test_infeasible_op_raises(self):
        t = parse("(())")
        tr = new_tracker(t, t)
        with pytest.raises(InfeasibleEditError):
            apply_edit(tr, EditOp(OpKind.DEL_LEAF, tr.current.root))

    def test_random_walks_match_full_recompute(self):
        rng = random.Random(61)
        for start in ["(())", "((()))", "(()())", "(((()))())"]:
            t0 = parse(start)
            tr = new_tracker(t0, t0)
            for step in range(120):
                pool = enumerate_ops(tr.current).all
                op = pool[rng.randrange(len(pool))]
                got = apply_edit(tr, op)
                want = full_distance(tr.state.origin, tr.current).distance
                assert got == want, (start, step, op)
            assert verify(tr) is None

    def test_log_and_step_advance(self):
        t = parse("(())")
        tr = new_tracker(t, t)
        op = EditOp(OpKind.ADD_LEAF, t.root)
        apply_edit(tr, op)
        assert tr.step == 1
        assert tr.log == [op]


class TestVerify:
    def test_detects_corruption(self):
        t = parse("((())())")
        tr = new_tracker(t, t)
        key = sorted(tr.state.table)[2]
        tr.state.table[key].d += 1
        mismatch = verify(tr)
        assert mismatch is not None
        assert (mismatch.v, mismatch.w) == key

    def test_shadow_verification_raises(self):
        t = parse("((()))")
        tr = new_tracker(t, t, verify_every=1)
        tr._skip_repair = True
        with pytest.raises(TrackerDivergence):
            for _ in range(20):
                pool = enumerate_ops(tr.current).all
                apply_edit(tr, pool[0])

    def test_clean_walk_with_shadow(self):
        t = parse("(()())")
        tr = new_tracker(t, t, verify_every=5)
        rng = random.Random(3)
        for _ in range(30):
            pool = enumerate_ops(tr.current).all
            apply_edit(tr, pool[rng.randrange(len(pool))])
        assert tr.step == 30


class TestTouchedSet:
    def test_touched_pairs_confined_to_edit_column_and_ancestors(self):
        rng = random.Random(71)
        t0 = parse("((())(()))")
        tr = new_tracker(t0, t0, collect_stats=True)
        for step in range(150):
            pool = enumerate_ops(tr.current).all
            op = pool[rng.randrange(len(pool))]
            tree_before = tr.current.copy()
            apply_edit(tr, op)
            k = tr.log[-1].target if op.kind in (OpKind.DEL_LEAF, OpKind.DEL_INTERNAL) else None
            if op.kind in (OpKind.ADD_LEAF, OpKind.ADD_INTERNAL):
                k = max(tr.current.vertices())
                allowed = {k} | set(tr.current.ancestors(k))
            else:
                k = op.target
                allowed = {k} | {op.target} | set(tree_before.ancestors(op.target))
            for (v, w) in tr.last_touched:
                assert w in allowed, (step, op, (v, w), allowed)

    def test_touched_pair_count_bound(self):
        from tedwalk.tree import height

        rng = random.Random(73)
        t0 = parse("((()())())")
        tr = new_tracker(t0, t0, collect_stats=True)
        for _ in range(150):
            pool = enumerate_ops(tr.current).all
            apply_edit(tr, pool[rng.randrange(len(pool))])
            bound = t0.size * (height(tr.current) + 2)
            assert len(tr.last_touched) <= bound

    def test_flow_pivots_within_supply_per_pair(self):
        rng = random.Random(79)
        t0 = parse("((()())(())())")
        tr = new_tracker(t0, t0, collect_stats=True)
        for _ in range(200):
            pool = enumerate_ops(tr.current).all
            apply_edit(tr, pool[rng.randrange(len(pool))])
            for pivots, supply in tr.last_solves:
                assert pivots <= supply


class TestLeafPrototypeRows:
    def test_rows_against_new_leaf_are_analytic(self):
        t0 = parse("((())(()))")
        tr = new_tracker(t0, t0)
        apply_edit(tr, EditOp(OpKind.ADD_LEAF, t0.root))
        k = max(tr.current.vertices())
        for v in tr.state.post0:
            info = tr.state.table[(v, k)]
            assert info.d == tr.state.size0[v] - 1
            assert info.df == tr.state.size0[v] - 1
