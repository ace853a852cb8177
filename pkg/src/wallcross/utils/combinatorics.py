"""Enumeration helpers: compositions, surjections, labeled trees."""

from itertools import combinations, product
from typing import Iterator, List, Sequence, Tuple

from sympy.combinatorics.prufer import Prufer


def compositions(n: int, parts: int = None) -> Iterator[Tuple[int, ...]]:
    """Ordered tuples of positive integers summing to n.

    These are the block sizes of the monotone surjections {1..n} -> {1..m}.
    """
    if n == 0:
        if parts in (None, 0):
            yield ()
        return
    for cuts_count in range(n):
        m = cuts_count + 1
        if parts is not None and m != parts:
            continue
        for cuts in combinations(range(1, n), cuts_count):
            bounds = (0,) + cuts + (n,)
            yield tuple(bounds[i + 1] - bounds[i] for i in range(m))


def split_blocks(seq: Sequence, sizes: Sequence[int]) -> List[tuple]:
    out = []
    start = 0
    for size in sizes:
        out.append(tuple(seq[start : start + size]))
        start += size
    return out


def surjections(n: int, m: int) -> Iterator[Tuple[int, ...]]:
    """All maps range(n) -> range(m) hitting every value."""
    for values in product(range(m), repeat=n):
        if len(set(values)) == m:
            yield values


def labeled_trees(n: int) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Every labeled tree on range(n), as sorted undirected edge tuples."""
    if n == 1:
        yield ()
        return
    for seq in product(range(n), repeat=n - 2):
        edges = Prufer.to_tree(list(seq))
        yield tuple(sorted(tuple(sorted(e)) for e in edges))


def factorial_weight(sizes: Sequence[int]) -> int:
    out = 1
    for size in sizes:
        for k in range(2, size + 1):
            out *= k
    return out
