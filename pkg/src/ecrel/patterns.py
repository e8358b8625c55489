"""Failure patterns and their cluster structure.

A failure pattern is the sequence of disk labels (1-based) obtained by
sorting all failure instants in a window. For an ``(n, k)`` code a
*cluster* is an index interval ``[a, b]`` (1-based, inclusive, length
``b - a``) whose labels contain exactly ``n - k + 1`` distinct disks. A
cluster is *tight* when it contains no shorter cluster and *minimal* when
its length is ``n - k``.

A gap vector ``bits`` has ``bits[i-1] = 1`` when ``x_{i+1} - x_i < t_rep``.
It is an error vector for a pattern when it is all ones on the gaps of
some tight cluster.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from ecrel.combinatorics import check_enumeration_guard

__all__ = [
    "Cluster",
    "ClusterSet",
    "count_minimal_clusters",
    "enumerate_patterns",
    "find_clusters",
    "find_clusters_bruteforce",
    "is_error_vector",
    "pattern_from_instants",
    "tight_masks",
]


@dataclass(frozen=True)
class Cluster:
    a: int
    b: int
    tight: bool
    minimal: bool

    @property
    def length(self) -> int:
        return self.b - self.a

    @property
    def interval(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class ClusterSet:
    """All clusters of one pattern; ``s`` is the pattern length."""

    s: int
    clusters: tuple[Cluster, ...]

    def __iter__(self) -> Iterator[Cluster]:
        return iter(self.clusters)

    def __len__(self) -> int:
        return len(self.clusters)

    @property
    def tight(self) -> list[Cluster]:
        return [c for c in self.clusters if c.tight]

    @property
    def minimal(self) -> list[Cluster]:
        return [c for c in self.clusters if c.minimal]


def _check_code(n: int, k: int) -> None:
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got (n, k) = ({n}, {k})")


def enumerate_patterns(m: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield every distinct arrangement of ``1^m1 2^m2 ... n^mn`` once."""
    check_enumeration_guard(m)
    counts = list(m)
    s = sum(counts)
    current: list[int] = []

    def rec() -> Iterator[tuple[int, ...]]:
        if len(current) == s:
            yield tuple(current)
            return
        for d, c in enumerate(counts):
            if c:
                counts[d] -= 1
                current.append(d + 1)
                yield from rec()
                current.pop()
                counts[d] += 1

    yield from rec()


def pattern_from_instants(instants: Sequence[Sequence[float]]) -> tuple[int, ...]:
    """Pattern for per-disk failure instants; ties go to the lower disk index."""
    tagged = [(x, d + 1) for d, xs in enumerate(instants) for x in xs]
    tagged.sort()
    return tuple(d for _, d in tagged)


def find_clusters(f: Sequence[int], n: int, k: int) -> ClusterSet:
    _check_code(n, k)
    target = n - k + 1
    s = len(f)
    found = []
    for a in range(s):
        seen: dict[int, int] = {}
        for b in range(a, s):
            seen[f[b]] = seen.get(f[b], 0) + 1
            if len(seen) > target:
                break
            if len(seen) == target:
                # Tight iff the endpoint labels are unique inside [a, b].
                tight = f[a] != f[b] and seen[f[a]] == 1 and seen[f[b]] == 1
                found.append(Cluster(a + 1, b + 1, tight, b - a == n - k))
    return ClusterSet(s, tuple(found))


def find_clusters_bruteforce(f: Sequence[int], n: int, k: int) -> ClusterSet:
    """Definition-level cluster search, O(s^4); kept for cross-checking."""
    _check_code(n, k)
    target = n - k + 1
    s = len(f)
    intervals = [
        (a, b) for a in range(1, s + 1) for b in range(a, s + 1) if len(set(f[a - 1 : b])) == target
    ]
    found = []
    for a, b in intervals:
        contains_shorter = any(
            a <= c <= d <= b and (d - c) < (b - a) for c, d in intervals
        )
        found.append(Cluster(a, b, not contains_shorter, b - a == n - k))
    return ClusterSet(s, tuple(found))


def is_error_vector(bits: Sequence[int], clusters: ClusterSet) -> bool:
    if len(bits) != clusters.s - 1:
        raise ValueError(f"gap vector has length {len(bits)}, expected {clusters.s - 1}")
    return any(
        all(bits[i - 1] for i in range(c.a, c.b)) for c in clusters.clusters if c.tight
    )


def tight_masks(f: Sequence[int], n: int, k: int) -> tuple[int, ...]:
    """Tight clusters as bitmasks over gap indices (bit i-1 for gap i)."""
    masks = set()
    for c in find_clusters(f, n, k).clusters:
        if c.tight:
            masks.add(((1 << (c.b - c.a)) - 1) << (c.a - 1))
    return tuple(sorted(masks))


def count_minimal_clusters(f: Sequence[int], n: int, k: int) -> int:
    return sum(1 for c in find_clusters(f, n, k).clusters if c.minimal)
