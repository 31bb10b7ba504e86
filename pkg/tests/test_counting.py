import itertools
import random

import pytest

from patterncount.core import Permutation, naive_pattern_count, perm, perm_to_dp
from patterncount.counting import (
    BudgetExceeded,
    NotWestTree,
    OrderViolation,
    StreamWestCounter,
    corner_tree_profiles,
    corner_tree_to_dp,
    count_all_west,
    count_corner_tree,
    naive_morphism_count,
)
from patterncount.trees import CornerTree, snpolytree_to_ct
from tests.test_trees import random_corner_tree, random_polytree


def random_perm(rng, n):
    vals = list(range(1, n + 1))
    rng.shuffle(vals)
    return Permutation(tuple(vals))


def random_west_tree(rng, max_nodes=5) -> CornerTree:
    k = rng.randint(1, max_nodes)
    edges = tuple(
        (rng.randrange(child), child, rng.choice(["NW", "SW"]))
        for child in range(1, k)
    )
    return CornerTree(0, edges)


SE_NE_NW_TREE = CornerTree("r", (
    ("r", "a", "SE"),
    ("a", "b", "NE"),
    ("a", "c", "NW"),
))


# ----------------------------------------------- worked scan examples

def test_nw_edge_profile_on_34251():
    ct = CornerTree("a", (("a", "b", "NW"),))
    pi = perm([3, 4, 2, 5, 1])
    vertex, edge = corner_tree_profiles(pi, ct)
    assert edge[("a", "b")] == [0, 0, 2, 0, 4]
    assert count_corner_tree(pi, ct) == 6


def test_se_ne_nw_tree_on_231546():
    pi = perm([2, 3, 1, 5, 4, 6])
    vertex, edge = corner_tree_profiles(pi, SE_NE_NW_TREE)
    assert edge[("a", "b")] == [4, 3, 3, 1, 1, 0]
    assert edge[("a", "c")] == [0, 0, 2, 0, 1, 0]
    assert vertex["a"] == [0, 0, 6, 0, 1, 0]
    assert vertex["r"] == [6, 6, 0, 1, 0, 0]
    assert count_corner_tree(pi, SE_NE_NW_TREE) == 13


def test_single_ne_edge_counts_12():
    ct = CornerTree(0, ((0, 1, "NE"),))
    rng = random.Random(31)
    for _ in range(25):
        pi = random_perm(rng, rng.randint(1, 12))
        assert count_corner_tree(pi, ct) == naive_pattern_count(pi, perm([1, 2]))


def test_empty_permutation():
    assert count_corner_tree(Permutation(()), CornerTree(0, ())) == 0
    assert count_all_west(Permutation(()), CornerTree(0, ())) == 0


# -------------------------------------------------- morphism oracle

def test_corner_tree_equals_morphism_count():
    rng = random.Random(32)
    for _ in range(60):
        ct = random_corner_tree(rng, max_nodes=5)
        pi = random_perm(rng, rng.randint(1, 12))
        assert count_corner_tree(pi, ct) == \
            naive_morphism_count(corner_tree_to_dp(ct), pi)


def test_morphisms_of_permutation_dp_are_pattern_occurrences():
    rng = random.Random(33)
    for _ in range(25):
        sigma = random_perm(rng, rng.randint(1, 4))
        pi = random_perm(rng, rng.randint(sigma.n, 10))
        assert naive_morphism_count(perm_to_dp(sigma), pi) == \
            naive_pattern_count(pi, sigma)


def test_single_point_dp():
    d = perm_to_dp(perm([1]))
    rng = random.Random(34)
    for n in (1, 4, 9):
        assert naive_morphism_count(d, random_perm(rng, n)) == n


def test_budget():
    d = perm_to_dp(perm([1, 2, 3, 4, 5, 6, 7]))
    with pytest.raises(BudgetExceeded):
        naive_morphism_count(d, random_perm(random.Random(0), 30))


# ------------------------------------------------------- streaming

def test_stream_single_sw_edge():
    tree = CornerTree(0, ((0, 1, "SW"),))
    counter = StreamWestCounter(tree, 5)
    total = sum(counter.process(x, y)
                for x, y in enumerate(perm([3, 4, 2, 5, 1]).zero_indexed()))
    assert total == 4


def test_stream_gated_counts_restricted_permutation():
    # Feeding only points below a value threshold counts occurrences within
    # the restricted pattern.
    rng = random.Random(35)
    for _ in range(20):
        pi = random_perm(rng, rng.randint(2, 24))
        r = rng.randint(1, pi.n)
        tree = random_west_tree(rng, 4)
        counter = StreamWestCounter(tree, pi.n)
        total = 0
        kept = []
        for x, y in enumerate(pi.zero_indexed()):
            if y < r:
                total += counter.process(x, y)
                kept.append(y + 1)
        from patterncount.core import std
        restricted = std(kept) if kept else Permutation(())
        assert total == count_all_west(restricted, tree)


def test_stream_single_node_returns_one():
    counter = StreamWestCounter(CornerTree("z", ()), 3)
    assert [counter.process(x, y) for x, y in enumerate([2, 0, 1])] == [1, 1, 1]


def test_stream_rejects_non_west():
    with pytest.raises(NotWestTree):
        StreamWestCounter(CornerTree(0, ((0, 1, "NE"),)), 4)


def test_stream_rejects_out_of_order():
    counter = StreamWestCounter(CornerTree(0, ((0, 1, "SW"),)), 4)
    counter.process(2, 0)
    with pytest.raises(OrderViolation):
        counter.process(2, 1)
    with pytest.raises(OrderViolation):
        counter.process(1, 3)


def test_count_all_west_matches_general():
    rng = random.Random(36)
    for _ in range(200):
        tree = random_west_tree(rng, 5)
        pi = random_perm(rng, rng.randint(1, 60))
        assert count_all_west(pi, tree) == count_corner_tree(pi, tree)


def test_sw_chain_on_identity_is_binomial():
    import math
    for n, k in [(6, 1), (6, 2), (7, 3), (8, 4)]:
        edges = tuple((i, i + 1, "SW") for i in range(k - 1))
        tree = CornerTree(0, edges)
        ident = perm(range(1, n + 1))
        assert count_all_west(ident, tree) == math.comb(n, k)


# -------------------------------------------------- global properties

def test_rerooting_invariance():
    rng = random.Random(37)
    for _ in range(40):
        t = random_polytree(rng, 5)
        pi = random_perm(rng, rng.randint(1, 10))
        counts = {count_corner_tree(pi, snpolytree_to_ct(t, v)) for v in t.nodes}
        assert len(counts) == 1


def test_appending_new_maximum_is_monotone():
    rng = random.Random(38)
    for _ in range(20):
        ct = random_corner_tree(rng, 4)
        pi = random_perm(rng, rng.randint(1, 9))
        extended = Permutation(pi.values + (pi.n + 1,))
        assert count_corner_tree(extended, ct) >= count_corner_tree(pi, ct)
