import math
from collections import Counter

import pytest

from tedwalk.edits import OpKind, apply as apply_op, enumerate_ops
from tedwalk.tree import Tree, canonical_code, parse
from tedwalk.walk import (
    Kernel,
    TrajectoryRecord,
    initial_tree,
    rng_stream,
    sample_op,
    simulate,
    step,
)


class TestSampleOp:
    def test_single_node_forced_add(self):
        rng = rng_stream(1, 0)
        for _ in range(50):
            op = sample_op(Tree(), Kernel.BALANCED, rng)
            assert op.kind is OpKind.ADD_LEAF

    def test_chain_2_balanced_law(self):
        # from the 2-chain: delete back to the single node w.p. 1/2,
        # grow to the 3-chain w.p. 1/3 and to nothing else but the chain,
        # star split 1/3 : 1/6
        t = parse("(())")
        rng = rng_stream(2, 0)
        counts = Counter()
        n = 30000
        for _ in range(n):
            op = sample_op(t, Kernel.BALANCED, rng)
            t2, _ = apply_op(t, op)
            counts[canonical_code(t2)] += 1
        p_single = counts["()"] / n
        p_chain3 = counts["((()))"] / n
        p_star3 = counts["(()())"] / n
        assert abs(p_single - 1 / 2) < 3 * math.sqrt(0.25 / n)
        assert abs(p_chain3 - 1 / 3) < 3 * math.sqrt((1 / 3) * (2 / 3) / n)
        assert abs(p_star3 - 1 / 6) < 3 * math.sqrt((1 / 6) * (5 / 6) / n)

    def test_isotropic_uniform_over_ops(self):
        t = parse("((()))")
        pool = enumerate_ops(t).all
        rng = rng_stream(3, 0)
        counts = Counter()
        n = 21000
        for _ in range(n):
            counts[sample_op(t, Kernel.ISOTROPIC, rng)] += 1
        for op in pool:
            p = counts[op] / n
            want = 1 / len(pool)
            assert abs(p - want) < 3 * math.sqrt(want * (1 - want) / n)

    def test_same_stream_same_sequence(self):
        t = parse("((())())")
        a = [sample_op(t, Kernel.BALANCED, rng_stream(9, 4)) for _ in range(1)]
        b = [sample_op(t, Kernel.BALANCED, rng_stream(9, 4)) for _ in range(1)]
        assert a == b


class TestStep:
    def test_input_untouched(self):
        t = parse("(()())")
        code = canonical_code(t)
        rng = rng_stream(5, 0)
        op, t2 = step(t, Kernel.BALANCED, rng)
        assert canonical_code(t) == code
        assert abs(t2.size - t.size) == 1


class TestInitialTree:
    def test_x1_single(self):
        assert initial_tree(1, rng_stream(0, 0)).size == 1

    def test_x2_always_chain(self):
        for i in range(20):
            assert canonical_code(initial_tree(2, rng_stream(7, i))) == "(())"

    def test_x3_law(self):
        counts = Counter()
        n = 9000
        for i in range(n):
            counts[canonical_code(initial_tree(3, rng_stream(11, i)))] += 1
        p_chain = counts["((()))"] / n
        assert abs(p_chain - 2 / 3) < 3 * math.sqrt((2 / 3) * (1 / 3) / n)

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            initial_tree(0, rng_stream(0, 0))


class TestSimulate:
    def test_h0_single_record(self):
        recs = simulate(parse("(())"), 0, Kernel.BALANCED, rng_stream(1, 0))
        assert len(recs) == 1
        assert recs[0] == TrajectoryRecord(0, None, 2, 1, 1, 1, 0)

    def test_parity_and_bounds_every_step(self):
        t0 = initial_tree(5, rng_stream(13, 0))
        recs = simulate(t0, 400, Kernel.BALANCED, rng_stream(13, 1))
        x = t0.size
        for r in recs:
            assert abs(r.size - x) <= r.dist <= r.size + x
            assert (r.dist - abs(r.size - x)) % 2 == 0

    def test_determinism(self):
        t0 = initial_tree(4, rng_stream(17, 0))
        a = simulate(t0, 100, Kernel.BALANCED, rng_stream(17, 1))
        b = simulate(t0, 100, Kernel.BALANCED, rng_stream(17, 1))
        assert a == b

    def test_sizes_move_by_one(self):
        recs = simulate(parse("((()))"), 200, Kernel.ISOTROPIC, rng_stream(19, 0))
        for prev, cur in zip(recs, recs[1:]):
            assert abs(cur.size - prev.size) == 1

    def test_distance_engines_agree(self):
        t0 = initial_tree(6, rng_stream(23, 0))
        a = simulate(t0, 60, Kernel.BALANCED, rng_stream(23, 1), distance="incremental")
        b = simulate(t0, 60, Kernel.BALANCED, rng_stream(23, 1), distance="full")
        assert [r.dist for r in a] == [r.dist for r in b]

    def test_distance_none(self):
        recs = simulate(parse("(())"), 10, Kernel.BALANCED, rng_stream(29, 0), distance="none")
        assert all(r.dist is None for r in recs)

    def test_first_step_distance_one(self):
        recs = simulate(parse("((()))"), 1, Kernel.BALANCED, rng_stream(31, 0))
        assert recs[1].dist == 1

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            simulate(parse("(())"), 1, Kernel.BALANCED, rng_stream(0, 0), distance="magic")


class TestReflectedSizeLaw:
    def test_up_step_frequency_half(self):
        # aggregate over replicates: steps from size >= 2 go up w.p. 1/2
        ups = 0
        total = 0
        for i in range(60):
            recs = simulate(
                initial_tree(3, rng_stream(37, i)),
                400,
                Kernel.BALANCED,
                rng_stream(41, i),
                distance="none",
            )
            for prev, cur in zip(recs, recs[1:]):
                if prev.size >= 2:
                    total += 1
                    ups += cur.size > prev.size
        assert total > 10_000
        freq = ups / total
        assert abs(freq - 0.5) < 3 * math.sqrt(0.25 / total)

    def test_size_one_forced_up(self):
        recs = simulate(Tree(), 300, Kernel.BALANCED, rng_stream(43, 0), distance="none")
        for prev, cur in zip(recs, recs[1:]):
            if prev.size == 1:
                assert cur.size == 2
