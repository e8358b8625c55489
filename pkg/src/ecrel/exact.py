"""Exact and asymptotic loss probabilities for constant repair duration.

Conditioned on ``m[i]`` failures of disk ``i`` (iid uniform instants on
``[0, t]``) and a constant repair time ``t_rep``, data is lost when some
tight cluster of the sorted failure pattern has all of its gaps shorter
than ``t_rep``. Averaging over patterns and splitting each pattern's error
set into the disjoint regions ``R_b`` gives an exact rational answer.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from ecrel.code import CodeParams
from ecrel.combinatorics import binomial, check_enumeration_guard, elementary_symmetric
from ecrel.errors import ValidityDomainError
from ecrel.patterns import enumerate_patterns, tight_masks
from ecrel.volume import VolumePolynomial, vp_rules

__all__ = [
    "ChenEstimate",
    "asymptotic_loss",
    "chen_estimate",
    "error_weight_counts",
    "exact_loss",
    "loss_21_closed",
    "loss_polynomial",
    "pattern_polynomial",
    "poisson_asymptotic",
    "transition_distribution",
]


def _as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def _resolve_rho(rho, tau) -> Fraction:
    if rho is None and tau is None:
        raise ValueError("give rho = t/t_rep or tau = t_rep/t")
    if rho is not None:
        r = _as_rational(rho)
        if tau is not None and r * _as_rational(tau) != 1:
            raise ValueError("rho and tau are not reciprocal")
        return r
    tau_q = _as_rational(tau)
    if tau_q <= 0:
        raise ValueError("tau must be positive")
    return 1 / tau_q


@lru_cache(maxsize=4096)
def error_weight_counts(masks: tuple[int, ...], s: int) -> tuple[int, ...]:
    """Count full gap vectors of each weight that cover at least one mask."""
    counts = [0] * s
    if not masks or s < 2:
        return tuple(counts)
    for bits in range(1 << (s - 1)):
        for mask in masks:
            if bits & mask == mask:
                counts[bits.bit_count()] += 1
                break
    return tuple(counts)


def _from_weights(per_weight: Sequence[int], s: int) -> VolumePolynomial:
    total = VolumePolynomial.zero(s)
    for w, c in enumerate(per_weight):
        if c:
            total = total + c * vp_rules(s - 1 - w, w, s)
    return total


def pattern_polynomial(code: CodeParams, f: Sequence[int]) -> VolumePolynomial:
    """Sum of ``v_b`` over the error vectors ``b`` of one failure pattern."""
    s = len(f)
    if s == 0:
        return VolumePolynomial.zero(0)
    if any(not 1 <= d <= code.n for d in f):
        raise ValueError(f"labels must lie in 1..{code.n}")
    return _from_weights(error_weight_counts(tight_masks(f, code.n, code.k), s), s)


def loss_polynomial(code: CodeParams, m: Sequence[int]) -> VolumePolynomial:
    """Sum over patterns of the scaled volume of the pattern's error set.

    Every one of the ``2**(s-1)`` full gap vectors is tested, so the regions
    summed are pairwise disjoint.
    """
    if len(m) != code.n:
        raise ValueError(f"expected {code.n} failure counts, got {len(m)}")
    if any(x < 0 for x in m):
        raise ValueError("failure counts must be nonnegative")
    s = sum(m)
    if s == 0:
        return VolumePolynomial.zero(0)
    check_enumeration_guard(m)
    per_weight = [0] * s
    for f in enumerate_patterns(m):
        for w, c in enumerate(error_weight_counts(tight_masks(f, code.n, code.k), s)):
            per_weight[w] += c
    return _from_weights(per_weight, s)


def exact_loss(code: CodeParams, m: Sequence[int], *, rho=None, tau=None) -> Fraction:
    """Exact loss probability given per-disk failure counts ``m``.

    ``rho = t / t_rep`` (or ``tau = 1 / rho``) must satisfy ``rho >= s - 1``
    where ``s = sum(m)``; below that the volume polynomials are not volumes.
    """
    r = _resolve_rho(rho, tau)
    s = sum(m)
    if r <= 0:
        raise ValueError("rho must be positive")
    if s >= 1 and r < s - 1:
        raise ValidityDomainError(
            f"rho={r} is below s-1={s - 1}; the polynomial form is not a volume there"
        )
    poly = loss_polynomial(code, m)
    if s == 0:
        return Fraction(0)
    patterns = check_enumeration_guard(m)
    return Fraction(poly(r)) / (r**s * patterns)


def transition_distribution(m1: int, m2: int) -> dict[int, Fraction]:
    """Distribution of the number of label changes in a random arrangement of 1^m1 2^m2."""
    if m1 < 0 or m2 < 0:
        raise ValueError("counts must be nonnegative")
    total = binomial(m1 + m2, m1)
    if m1 == 0 or m2 == 0:
        return {0: Fraction(1)}
    dist: dict[int, Fraction] = {}
    for runs in range(2, m1 + m2 + 1):
        if runs % 2 == 0:
            r = runs // 2
            ways = 2 * binomial(m1 - 1, r - 1) * binomial(m2 - 1, r - 1)
        else:
            r = runs // 2
            ways = binomial(m1 - 1, r) * binomial(m2 - 1, r - 1) + binomial(
                m1 - 1, r - 1
            ) * binomial(m2 - 1, r)
        if ways:
            dist[runs - 1] = Fraction(ways, total)
    return dist


def loss_21_closed(m1: int, m2: int, tau) -> Fraction:
    """Loss probability of the (2,1) code from the transition-count distribution."""
    tau_q = _as_rational(tau)
    s = m1 + m2
    if tau_q < 0 or tau_q * max(s - 1, 0) > 1:
        raise ValueError(f"need 0 <= tau and tau*(s-1) <= 1, got tau={tau_q}, s={s}")
    dist = transition_distribution(m1, m2)
    return 1 - sum((1 - j * tau_q) ** s * p for j, p in dist.items())


def asymptotic_loss(code: CodeParams, m: Sequence[int]) -> int:
    """``lim rho**(n-k) * P_m``: ``(n-k+1)!`` times the (n-k+1)-th elementary symmetric sum of ``m``."""
    if len(m) != code.n:
        raise ValueError(f"expected {code.n} failure counts, got {len(m)}")
    r = code.redundancy + 1
    return math.factorial(r) * elementary_symmetric(list(m), r)


def poisson_asymptotic(code: CodeParams, lam: float, t: float) -> float:
    """``lim P(D_t) / t_rep**(n-k)`` for per-disk Poisson(lam) failures."""
    if lam <= 0 or t < 0:
        raise ValueError("need lam > 0 and t >= 0")
    n, k = code.n, code.k
    return math.factorial(n) / math.factorial(k - 1) * lam ** (n - k + 1) * t


class ChenEstimate(NamedTuple):
    mttdl: float
    p_loss: float


def chen_estimate(code: CodeParams, lam: float, t_rep: float, t: float) -> ChenEstimate:
    """Markov-chain MTTDL for exponential failures and its first-order loss probability."""
    if lam <= 0 or t_rep <= 0 or t < 0:
        raise ValueError("need positive lam and t_rep, nonnegative t")
    n, k = code.n, code.k
    rate = math.factorial(n) / math.factorial(k - 1) * lam ** (n - k + 1) * t_rep ** (n - k)
    return ChenEstimate(mttdl=1.0 / rate, p_loss=rate * t)
