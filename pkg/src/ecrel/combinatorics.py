"""Exact integer combinatorics.

Everything here returns Python ``int`` or :class:`fractions.Fraction`; no
floating point is involved, so results can be compared with ``==``.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Sequence
from fractions import Fraction
from itertools import combinations, permutations

from ecrel.errors import EnumerationGuardError

__all__ = [
    "MAX_FAILURES",
    "MAX_PATTERNS",
    "alpha_j",
    "avg_tight_clusters",
    "avg_tight_clusters_closed",
    "beta_j",
    "beta_j_bruteforce",
    "binomial",
    "check_enumeration_guard",
    "elementary_symmetric",
    "multinomial",
    "pi_n",
    "stirling2",
]

MAX_PATTERNS = 10**6
MAX_FAILURES = 14

_stirling_rows: list[list[int]] = [[1]]
_stirling_lock = threading.Lock()


def binomial(n: int, r: int) -> int:
    """C(n, r), zero outside ``0 <= r <= n``."""
    if r < 0 or r > n or n < 0:
        return 0
    return math.comb(n, r)


def multinomial(s: int, parts: Sequence[int]) -> int:
    if any(p < 0 for p in parts):
        raise ValueError(f"negative part in {list(parts)}")
    if sum(parts) != s:
        raise ValueError(f"parts {list(parts)} do not sum to {s}")
    out = math.factorial(s)
    for p in parts:
        out //= math.factorial(p)
    return out


def stirling2(u: int, l: int) -> int:
    """Stirling number of the second kind S2(u, l).

    Rows of the triangle ``S2(u, l) = l*S2(u-1, l) + S2(u-1, l-1)`` are
    memoized process-wide behind a lock.
    """
    if u < 0 or l < 0:
        return 0
    if l > u:
        return 0
    with _stirling_lock:
        while len(_stirling_rows) <= u:
            prev = _stirling_rows[-1]
            m = len(prev)
            row = [0] * (m + 1)
            for j in range(1, m + 1):
                row[j] = j * (prev[j] if j < m else 0) + prev[j - 1]
            _stirling_rows.append(row)
        return _stirling_rows[u][l]


def pi_n(n: int, run_len: int, l: int) -> Fraction:
    """Probability that ``run_len`` iid uniform labels on ``{1..n}`` hit exactly ``l`` disks."""
    if n < 1 or run_len < 1:
        raise ValueError("need n >= 1 and run_len >= 1")
    if l < 0 or l > n or l > run_len:
        return Fraction(0)
    hits = binomial(n, l) * math.factorial(l) * stirling2(run_len, l)
    return Fraction(hits, n**run_len)


def _check_code(n: int, k: int) -> None:
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got (n, k) = ({n}, {k})")


def beta_j(n: int, k: int, j: int) -> int:
    """Binary strings of length n-1 and weight j with no run of n-k ones.

    Alternating-sum closed form for the coefficient of x**j in
    ``(1 + x + ... + x**(n-k-1)) ** (n-j)``.
    """
    _check_code(n, k)
    if j < 0 or j > n - 1:
        return 0
    r = n - k
    top = min(n - j, j // r)
    return sum(
        (-1) ** i * binomial(n - j, i) * binomial(n - 1 - r * i, n - j - 1)
        for i in range(top + 1)
    )


def beta_j_bruteforce(n: int, k: int, j: int) -> int:
    """Direct enumeration of the strings counted by :func:`beta_j`."""
    _check_code(n, k)
    bad = "1" * (n - k)
    count = 0
    for word in range(1 << (n - 1)):
        bits = format(word, f"0{n - 1}b") if n > 1 else ""
        if bits.count("1") == j and bad not in bits:
            count += 1
    return count


def alpha_j(n: int, k: int, j: int) -> int:
    """Error graphs of weight j: strings of length n-1 containing a run of n-k ones."""
    _check_code(n, k)
    return binomial(n - 1, j) - beta_j(n, k, j)


def elementary_symmetric(values: Sequence[int], r: int) -> int:
    """Sum over unordered r-subsets of indices of the product of ``values``."""
    if r < 0 or r > len(values):
        return 0
    # e_r via the usual DP over prefixes.
    e = [1] + [0] * r
    for v in values:
        for i in range(r, 0, -1):
            e[i] += e[i - 1] * v
    return e[r]


def check_enumeration_guard(m: Sequence[int]) -> int:
    """Return the number of failure patterns for ``m`` or raise if too many."""
    s = sum(m)
    if s > MAX_FAILURES:
        raise EnumerationGuardError(
            f"{s} failures exceeds the exact-enumeration limit of {MAX_FAILURES}"
        )
    count = multinomial(s, list(m))
    if count > MAX_PATTERNS:
        raise EnumerationGuardError(
            f"{count} failure patterns exceeds the limit of {MAX_PATTERNS}"
        )
    return count


def avg_tight_clusters(n: int, k: int, m: Sequence[int], l: int) -> Fraction:
    """Average number of tight clusters of length ``l`` over all failure patterns.

    Computed by enumerating every pattern; this is the reference value that
    :func:`avg_tight_clusters_closed` is checked against.
    """
    from ecrel.patterns import enumerate_patterns, find_clusters

    _check_code(n, k)
    if any(x < 0 for x in m):
        raise ValueError("failure counts must be nonnegative")
    s = sum(m)
    if l < n - k or s < l + 1:
        raise ValueError(f"need n-k <= l <= s-1, got l={l}, s={s}")
    total_patterns = check_enumeration_guard(m)
    hits = 0
    for f in enumerate_patterns(m):
        hits += sum(1 for c in find_clusters(f, n, k) if c.tight and c.length == l)
    return Fraction(hits, total_patterns)


def _interior_fillings(counts: Sequence[int], slots: int) -> int:
    """Sum over compositions q (q_i >= 1, sum = slots) of prod C(counts_i, q_i)."""
    # Polynomial product of sum_{q>=1} C(c, q) x^q, read off x^slots.
    poly = [1]
    for c in counts:
        factor = [0] + [binomial(c, q) for q in range(1, c + 1)]
        out = [0] * min(len(poly) + len(factor) - 1, slots + 1)
        for a, pa in enumerate(poly):
            if pa == 0:
                continue
            for b, fb in enumerate(factor):
                if a + b > slots:
                    break
                out[a + b] += pa * fb
        poly = out
    return poly[slots] if slots < len(poly) else 0


def avg_tight_clusters_closed(n: int, k: int, m: Sequence[int], l: int) -> Fraction:
    """Closed form for the average number of tight clusters of length ``l``.

    A window of ``l + 1`` consecutive positions is a tight cluster when its
    two endpoints come from distinct disks ``a != b`` and its ``l - 1``
    interior positions use exactly ``n - k - 1`` further disks, each at least
    once and none equal to ``a`` or ``b``. Counting ordered endpoint pairs and
    unordered interior disk sets gives

        A_l = (l-1)! (s-l)! / s! * sum_{a != b} m_a m_b
              * sum_{|D| = n-k-1} sum_{q >= 1, |q| = l-1} prod_{d in D} C(m_d, q_d).

    For ``l = n - k`` this reduces to
    ``(n-k+1)! (s-(n-k))! / s! * e_{n-k+1}(m)``.
    """
    _check_code(n, k)
    s = sum(m)
    if l < n - k or s < l + 1:
        raise ValueError(f"need n-k <= l <= s-1, got l={l}, s={s}")
    disks = range(len(m))
    total = 0
    for a, b in permutations(disks, 2):
        if m[a] == 0 or m[b] == 0:
            continue
        rest = [d for d in disks if d != a and d != b]
        inner = 0
        for interior in combinations(rest, n - k - 1):
            inner += _interior_fillings([m[d] for d in interior], l - 1)
        total += m[a] * m[b] * inner
    return Fraction(math.factorial(l - 1) * math.factorial(s - l) * total, math.factorial(s))
