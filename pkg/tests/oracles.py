"""Independent reference implementations used only by the tests.

Nothing here imports the package's polynomial or cluster machinery; each
oracle goes back to the defining event.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def region_volume(zeros: int, ones: int, s: int, rho) -> Fraction:
    """s! vol / t_rep**s of {gaps in `ones` < 1, gaps in `zeros` >= 1} by inclusion-exclusion.

    The s+1 spacings of s sorted points in [0, rho] are uniform on the
    simplex, so forcing a set of r spacings to be >= 1 leaves volume
    (rho - r)_+^s / s!. Each short-gap constraint is removed by subtracting
    the subset where it fails, enumerated subset by subset.
    """
    rho = Fraction(rho)
    total = Fraction(0)
    for r in range(ones + 1):
        for _ in itertools.combinations(range(ones), r):
            room = rho - zeros - r
            if room > 0:
                total += (-1) ** r * room**s
    return total


def tight_clusters_by_definition(f, n, k):
    """Tight clusters as (a, b) pairs, straight from the definitions."""
    target = n - k + 1
    s = len(f)
    clusters = [
        (a, b) for a in range(1, s + 1) for b in range(a, s + 1) if len(set(f[a - 1 : b])) == target
    ]
    return [
        (a, b)
        for a, b in clusters
        if not any(a <= c <= d <= b and d - c < b - a for c, d in clusters)
    ]


def distinct_patterns(m):
    labels = [d + 1 for d, c in enumerate(m) for _ in range(c)]
    return sorted(set(itertools.permutations(labels)))


def exact_loss_oracle(n, k, m, rho) -> Fraction:
    """Loss probability by pattern x gap-vector enumeration with an independent volume."""
    s = sum(m)
    pats = distinct_patterns(m)
    total = Fraction(0)
    for f in pats:
        tight = tight_clusters_by_definition(f, n, k)
        for bits in itertools.product((0, 1), repeat=s - 1):
            if any(all(bits[i - 1] for i in range(a, b)) for a, b in tight):
                total += region_volume(bits.count(0), bits.count(1), s, rho)
    return total / (Fraction(rho) ** s * len(pats))


def count_strings_without_run(length, weight, run):
    """Binary strings of given length and weight avoiding `run` consecutive ones."""
    count = 0
    for ones in itertools.combinations(range(length), weight):
        bits = [0] * length
        for i in ones:
            bits[i] = 1
        longest = cur = 0
        for b in bits:
            cur = cur + 1 if b else 0
            longest = max(longest, cur)
        if longest < run:
            count += 1
    return count


def g_mpmath(fail_cdf, rep_pdf, upper, dps=30):
    """P(Y < Z) = int F_Y f_Z by mpmath tanh-sinh quadrature."""
    import mpmath

    with mpmath.workdps(dps):
        return float(mpmath.quad(lambda z: fail_cdf(z) * rep_pdf(z), [0, upper / 1000, upper / 10, upper]))


def weibull_mp(shape, mean):
    import mpmath

    scale = mpmath.mpf(mean) / mpmath.gamma(1 + mpmath.mpf(1) / shape)

    def cdf(z):
        return -mpmath.expm1(-((z / scale) ** shape))

    def pdf(z):
        if z <= 0:
            return mpmath.mpf(0)
        return (shape / scale) * (z / scale) ** (shape - 1) * mpmath.exp(-((z / scale) ** shape))

    def quantile(p):
        return float(scale * (-mpmath.log(1 - mpmath.mpf(p))) ** (mpmath.mpf(1) / shape))

    return cdf, pdf, quantile


def poisson_pmf(mean, c):
    return math.exp(-mean) * mean**c / math.factorial(c)
