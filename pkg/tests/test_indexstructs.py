import random

import pytest

from patterncount.indexstructs import DuplicateColumn, ProductTree, SumTree


# ------------------------------------------------------------ SumTree

def test_add_then_prefix():
    t = SumTree(8)
    t.add(3, 5)
    assert t.prefix(4) == 5
    assert t.prefix(3) == 0


def test_complete_tree_root_update():
    # Leaves [1,1,1,0,0,1,0,1] sum to 5; setting the 7th leaf bumps it to 6.
    t = SumTree(8)
    for idx, v in enumerate([1, 1, 1, 0, 0, 1, 0, 1], start=1):
        t.add(idx, v)
    assert t.total == 5
    t.add(7, 1)
    assert t.total == 6


def test_zero_weight_is_noop():
    t = SumTree(6)
    t.add(2, 3)
    before = [t.prefix(k) for k in range(1, 7)]
    t.add(4, 0)
    assert [t.prefix(k) for k in range(1, 7)] == before


def test_strictness_both_sides():
    t = SumTree(5)
    t.add(2, 1)
    t.add(4, 1)
    assert t.prefix(4) == 1
    assert t.suffix(2) == 1
    assert t.prefix(2) == 0
    assert t.suffix(4) == 0


def test_nw_edge_trace_suffix():
    # Scanning [3,4,2,5,1] left to right, inserting 1 at each value and
    # querying the strict suffix: step 5 must see all four earlier points.
    pi = [3, 4, 2, 5, 1]
    t = SumTree(5)
    z = []
    for v in pi:
        t.add(v, 1)
        z.append(t.suffix(v))
    assert z[4] == 4
    assert z == [0, 0, 2, 0, 4]


def test_prefix_at_one_is_zero():
    t = SumTree(4)
    t.add(1, 7)
    assert t.prefix(1) == 0


def test_partition_invariant():
    rng = random.Random(11)
    t = SumTree(16)
    for _ in range(50):
        t.add(rng.randint(1, 16), rng.randint(0, 9))
    for k in range(1, 17):
        assert t.prefix(k) + t.value_at(k) + t.suffix(k) == t.total


def test_matches_naive_fold_at_every_step():
    rng = random.Random(12)
    for _ in range(20):
        n = rng.randint(1, 24)
        t = SumTree(n)
        naive = [0] * (n + 1)
        for _ in range(40):
            idx = rng.randint(1, n)
            w = rng.randint(-3, 9)
            t.add(idx, w)
            naive[idx] += w
            k = rng.randint(1, n)
            assert t.prefix(k) == sum(naive[1:k])
            assert t.suffix(k) == sum(naive[k + 1:])


def test_index_errors():
    t = SumTree(4)
    with pytest.raises(IndexError):
        t.add(0, 1)
    with pytest.raises(IndexError):
        t.add(5, 1)
    with pytest.raises(IndexError):
        t.prefix(0)
    with pytest.raises(IndexError):
        t.suffix(5)


# --------------------------------------------------------- ProductTree

def test_single_point():
    p = ProductTree(4)
    p.add(0, 0, 1)
    assert p.sum_box(0, 1, 0, 1) == 1
    assert p.sum_box(1, 4, 0, 4) == 0


def test_pair_occurrence_weights_full_box():
    # Weights = number of points strictly south-west of each point of
    # [2,3,1,5,4,6]; nonzero ones are 1, 3, 3 and 5, summing to 12.
    pi = [2, 3, 1, 5, 4, 6]
    weights = []
    for x, y in enumerate(pi):
        weights.append(sum(1 for x2, y2 in enumerate(pi) if x2 < x and y2 < y))
    assert sorted(w for w in weights if w) == [1, 3, 3, 5]
    p = ProductTree(6)
    for x, y in enumerate(pi):
        p.add(x, y - 1, weights[x])
    assert p.sum_box(0, 6, 0, 6) == 12


def test_zero_weight_add():
    p = ProductTree(5)
    p.add(1, 3, 4)
    p.add(2, 2, 0)
    assert p.sum_box(0, 5, 0, 5) == 4
    assert p.sum_box(2, 3, 2, 3) == 0


def test_empty_box():
    p = ProductTree(5)
    p.add(1, 1, 9)
    assert p.sum_box(3, 3, 0, 5) == 0
    assert p.sum_box(0, 5, 2, 2) == 0


def test_duplicate_column_rejected():
    p = ProductTree(5)
    p.add(2, 3, 1)
    p.add(2, 3, 5)  # same point: allowed, accumulates
    assert p.sum_box(0, 5, 0, 5) == 6
    with pytest.raises(DuplicateColumn):
        p.add(2, 4, 1)


def test_matches_naive_double_loop():
    rng = random.Random(13)
    for _ in range(500):
        n = rng.randint(1, 64)
        xs = rng.sample(range(n), k=rng.randint(0, n))
        pts = [(x, rng.randrange(n), rng.randint(0, 5)) for x in xs]
        p = ProductTree(n)
        for x, y, w in pts:
            p.add(x, y, w)
        for _ in range(5):
            x_lo = rng.randint(0, n)
            x_hi = rng.randint(x_lo, n)
            y_lo = rng.randint(0, n)
            y_hi = rng.randint(y_lo, n)
            expect = sum(w for x, y, w in pts
                         if x_lo <= x < x_hi and y_lo <= y < y_hi)
            assert p.sum_box(x_lo, x_hi, y_lo, y_hi) == expect


def test_additive_over_disjoint_boxes_all_block_boundaries():
    rng = random.Random(14)
    n = 32
    xs = rng.sample(range(n), k=20)
    p = ProductTree(n)
    total = 0
    for x in xs:
        w = rng.randint(0, 7)
        p.add(x, rng.randrange(n), w)
        total += w
    bounds = list(range(0, n + 1, 8))
    boxes = 0
    for i in range(len(bounds) - 1):
        for j in range(len(bounds) - 1):
            boxes += p.sum_box(bounds[i], bounds[i + 1], bounds[j], bounds[j + 1])
    assert boxes == total == p.sum_box(0, n, 0, n)


def test_box_index_errors():
    p = ProductTree(4)
    with pytest.raises(IndexError):
        p.sum_box(3, 2, 0, 4)
    with pytest.raises(IndexError):
        p.sum_box(0, 5, 0, 4)
    with pytest.raises(IndexError):
        p.add(4, 0, 1)
