"""Ground types: permutations, strict posets and double posets.

A permutation is stored in one-line notation with values 1..n.  A strict
poset on elements 0..n-1 is an irreflexive, asymmetric, transitive relation.
A double poset carries two strict posets on the same ground set, called
``west`` and ``south``: for permutations these are the position order and
the value order, which is what makes pattern occurrences come out as maps
preserving both orders.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


class InvalidInput(ValueError):
    """Malformed permutation or window data."""


class NotAPermutationPoset(ValueError):
    """Raised when a double poset with a non-total order is read as a permutation."""


class NotAcyclic(ValueError):
    """Raised when relation generators contain a directed cycle."""


class TooLargeForCanonicalization(ValueError):
    """Raised when brute-force canonicalization would be too expensive."""


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..n} in one-line notation.

    >>> Permutation((2, 1, 3)).inverse()
    Permutation(values=(2, 1, 3))
    """

    values: tuple[int, ...]

    def __post_init__(self):
        n = len(self.values)
        if sorted(self.values) != list(range(1, n + 1)):
            raise InvalidInput(f"not a bijection of 1..{n}: {self.values!r}")

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, i: int) -> int:
        """Value at 1-indexed position i."""
        return self.values[i - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.values)
        for pos, val in enumerate(self.values):
            inv[val - 1] = pos + 1
        return Permutation(tuple(inv))

    def zero_indexed(self) -> tuple[int, ...]:
        """Values shifted to 0..n-1, handy for array indexing."""
        return tuple(v - 1 for v in self.values)

    def rotate180(self) -> "Permutation":
        """Reverse positions and complement values (the Anti image)."""
        n = len(self.values)
        return Permutation(tuple(n + 1 - v for v in reversed(self.values)))

    def __str__(self) -> str:
        return "[" + " ".join(str(v) for v in self.values) + "]"


def perm(values: Iterable[int]) -> Permutation:
    """Shorthand constructor accepting any iterable of 1-indexed values."""
    return Permutation(tuple(values))


@dataclass(frozen=True)
class StrictPoset:
    """A strict partial order: asymmetric and transitive pairs on 0..n-1."""

    n: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        succ = [0] * self.n
        for a, b in self.pairs:
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise InvalidInput(f"pair {(a, b)} out of range for n={self.n}")
            if a == b:
                raise InvalidInput(f"reflexive pair {(a, b)}")
            if (b, a) in self.pairs:
                raise InvalidInput(f"asymmetric violation on {(a, b)}")
            succ[a] |= 1 << b
        for a in range(self.n):
            below = 0
            m = succ[a]
            while m:
                low = m & -m
                below |= succ[low.bit_length() - 1]
                m ^= low
            if below & ~succ[a]:
                raise InvalidInput(f"not transitive at element {a}")

    def less(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def comparable(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs or (b, a) in self.pairs

    def is_total(self) -> bool:
        return 2 * len(self.pairs) == self.n * (self.n - 1)

    def covers(self) -> frozenset[tuple[int, int]]:
        return transitive_reduction(self)

    def reversed(self) -> "StrictPoset":
        return StrictPoset(self.n, frozenset((b, a) for a, b in self.pairs))


def empty_poset(n: int) -> StrictPoset:
    return StrictPoset(n, frozenset())


def chain_poset(n: int, order: Sequence[int] | None = None) -> StrictPoset:
    """Total order; `order` lists elements from smallest to largest."""
    seq = list(order) if order is not None else list(range(n))
    pairs = frozenset(
        (seq[i], seq[j]) for i in range(n) for j in range(i + 1, n)
    )
    return StrictPoset(n, pairs)


def transitive_closure(rel: Iterable[tuple[int, int]], n: int) -> StrictPoset:
    """Smallest transitive relation containing `rel`.

    Raises NotAcyclic when the generators contain a directed cycle
    (including 2-cycles, i.e. asymmetry violations, and self-loops).
    """
    reach = [0] * n
    for a, b in rel:
        if not (0 <= a < n and 0 <= b < n):
            raise InvalidInput(f"pair {(a, b)} out of range for n={n}")
        reach[a] |= 1 << b
    # Bitmask Floyd-Warshall: reach[a] accumulates everything below a.
    for k in range(n):
        kbit = 1 << k
        for a in range(n):
            if reach[a] & kbit:
                reach[a] |= reach[k]
    pairs = set()
    for a in range(n):
        if reach[a] & (1 << a):
            raise NotAcyclic(f"cycle through element {a}")
        m = reach[a]
        while m:
            low = m & -m
            pairs.add((a, low.bit_length() - 1))
            m ^= low
    return StrictPoset(n, frozenset(pairs))


def transitive_reduction(p: StrictPoset) -> frozenset[tuple[int, int]]:
    """The Hasse diagram: pairs (a, b) with nothing strictly between."""
    out = set()
    for a, b in p.pairs:
        if not any((a, c) in p.pairs and (c, b) in p.pairs for c in range(p.n)):
            out.add((a, b))
    return frozenset(out)


@dataclass(frozen=True)
class DoublePoset:
    """Two strict posets on a shared ground set 0..n-1."""

    n: int
    west: StrictPoset
    south: StrictPoset

    def __post_init__(self):
        if self.west.n != self.n or self.south.n != self.n:
            raise InvalidInput("order sizes disagree with ground set size")

    def restrict(self, keep: Sequence[int]) -> "DoublePoset":
        """Induced double poset on `keep`, relabeled to 0..len(keep)-1."""
        idx = {e: i for i, e in enumerate(keep)}
        w = frozenset((idx[a], idx[b]) for a, b in self.west.pairs
                      if a in idx and b in idx)
        s = frozenset((idx[a], idx[b]) for a, b in self.south.pairs
                      if a in idx and b in idx)
        k = len(keep)
        return DoublePoset(k, StrictPoset(k, w), StrictPoset(k, s))


def double_poset(n: int, west: Iterable[tuple[int, int]],
                 south: Iterable[tuple[int, int]]) -> DoublePoset:
    """Build a double poset from acyclic generator pairs, closing transitively."""
    return DoublePoset(n, transitive_closure(west, n), transitive_closure(south, n))


def std(window: Sequence[int]) -> Permutation:
    """Standardization: the unique permutation order-isomorphic to `window`.

    >>> std((5, 3, 4)).values
    (3, 1, 2)
    """
    if len(set(window)) != len(window):
        raise InvalidInput(f"duplicate entries in window {window!r}")
    rank = {v: i + 1 for i, v in enumerate(sorted(window))}
    return Permutation(tuple(rank[v] for v in window))


def naive_pattern_count(big: Permutation, pattern: Permutation) -> int:
    """Count occurrences of `pattern` in `big` by subset enumeration.

    Deliberately simple; the reference oracle for everything faster.
    """
    k, n = pattern.n, big.n
    if k > n:
        return 0
    target = pattern.values
    count = 0
    for positions in itertools.combinations(range(n), k):
        window = [big.values[p] for p in positions]
        if std(window).values == target:
            count += 1
    return count


def pattern_count_table(big: Permutation, sizes: Iterable[int]) -> dict[Permutation, int]:
    """All pattern counts of `big` for the given pattern sizes, in one sweep."""
    table: dict[Permutation, int] = {}
    for k in sizes:
        for positions in itertools.combinations(range(big.n), k):
            window = [big.values[p] for p in positions]
            pat = std(window)
            table[pat] = table.get(pat, 0) + 1
    return table


def perm_to_dp(sigma: Permutation) -> DoublePoset:
    """Encode a permutation as a double poset (position order, value order).

    Element i (a 0-indexed position) sits west of j iff i < j, and south of
    j iff sigma(i) < sigma(j).
    """
    n = sigma.n
    vals = sigma.values
    west = chain_poset(n)
    south_order = sorted(range(n), key=lambda i: vals[i])
    return DoublePoset(n, west, chain_poset(n, south_order))


def dp_to_perm(d: DoublePoset) -> Permutation:
    """Inverse of perm_to_dp; both orders must be total."""
    if not (d.west.is_total() and d.south.is_total()):
        raise NotAPermutationPoset("both orders must be total")
    west_rank = _total_order_ranks(d.west)
    south_rank = _total_order_ranks(d.south)
    values = [0] * d.n
    for e in range(d.n):
        values[west_rank[e]] = south_rank[e] + 1
    return Permutation(tuple(values))


def _total_order_ranks(p: StrictPoset) -> list[int]:
    rank = [0] * p.n
    for a, b in p.pairs:
        rank[b] += 1
    return rank


def swap(d: DoublePoset) -> DoublePoset:
    """Exchange the two orders.  An involution."""
    return DoublePoset(d.n, d.south, d.west)


def anti(d: DoublePoset) -> DoublePoset:
    """Reverse both orders.  An involution."""
    return DoublePoset(d.n, d.west.reversed(), d.south.reversed())


@dataclass(frozen=True)
class Classification:
    is_twin: bool
    is_tree: bool
    is_twin_tree: bool
    is_permutation: bool


def classify(d: DoublePoset) -> Classification:
    """Hasse-diagram flags of a double poset.

    twin: both Hasse diagrams equal as labeled undirected graphs;
    tree: both Hasse diagrams are trees (connected and acyclic);
    permutation: both orders are total.
    """
    hw = d.west.covers()
    hs = d.south.covers()
    uw = frozenset(frozenset(e) for e in hw)
    us = frozenset(frozenset(e) for e in hs)
    is_twin = uw == us
    is_tree = _is_tree(uw, d.n) and _is_tree(us, d.n)
    return Classification(
        is_twin=is_twin,
        is_tree=is_tree,
        is_twin_tree=is_twin and is_tree,
        is_permutation=d.west.is_total() and d.south.is_total(),
    )


def _is_tree(undirected_edges: frozenset[frozenset[int]], n: int) -> bool:
    if len(undirected_edges) != n - 1:
        return False
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for e in undirected_edges:
        a, b = tuple(e)
        adj[a].append(b)
        adj[b].append(a)
    seen = {0} if n else set()
    stack = [0] if n else []
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def relabel(d: DoublePoset, image: Sequence[int]) -> DoublePoset:
    """Apply the relabeling e -> image[e] to both orders."""
    w = frozenset((image[a], image[b]) for a, b in d.west.pairs)
    s = frozenset((image[a], image[b]) for a, b in d.south.pairs)
    return DoublePoset(d.n, StrictPoset(d.n, w), StrictPoset(d.n, s))


CanonicalForm = tuple


_CANONICAL_CAP = 8


@lru_cache(maxsize=200_000)
def canonical_form(d: DoublePoset) -> CanonicalForm:
    """Lexicographically minimal encoding over all relabelings.

    Two double posets are isomorphic iff their canonical forms are equal.
    Brute force over n! relabelings, hence the size cap.
    """
    if d.n > _CANONICAL_CAP:
        raise TooLargeForCanonicalization(
            f"n={d.n} exceeds canonicalization cap {_CANONICAL_CAP}")
    best = None
    wp = d.west.pairs
    sp = d.south.pairs
    for image in itertools.permutations(range(d.n)):
        enc = (
            tuple(sorted((image[a], image[b]) for a, b in wp)),
            tuple(sorted((image[a], image[b]) for a, b in sp)),
        )
        if best is None or enc < best:
            best = enc
    return (d.n,) + best


def are_isomorphic(d1: DoublePoset, d2: DoublePoset) -> bool:
    if d1.n != d2.n:
        return False
    if len(d1.west.pairs) != len(d2.west.pairs):
        return False
    if len(d1.south.pairs) != len(d2.south.pairs):
        return False
    return canonical_form(d1) == canonical_form(d2)
