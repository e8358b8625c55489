"""Set-avoidance bounds on data loss.

With one failure per disk, data is lost when the point ``(x_1, ..., x_n)``
lands in the error region ``R`` of the cube ``[0, t]^n``. The scaled volume
``vol(R) / t_rep**n`` is the error polynomial ``e(rho)``. With several
failures per disk each choice of one failure per disk must avoid ``R``, and
a Jensen-type inequality turns that into an upper bound on loss.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ecrel.code import CodeParams
from ecrel.combinatorics import alpha_j, binomial
from ecrel.errors import ValidityDomainError
from ecrel.volume import VolumePolynomial, vp_rules

__all__ = [
    "ErrorPolynomial",
    "avoidance_loss_upper",
    "error_polynomial",
    "multiplicative_gap",
    "poisson_avoidance_upper",
    "second_order_avoidance_upper",
]

MAX_N = 20


@dataclass(frozen=True)
class ErrorPolynomial:
    code: CodeParams
    poly: VolumePolynomial

    def __call__(self, rho):
        return self.poly(rho)

    def error_probability(self, rho) -> float | Fraction:
        """``vol(R) / t**n`` at ``rho = t / t_rep``; exact for rational ``rho``."""
        n = self.code.n
        if rho < n - 1:
            raise ValidityDomainError(f"need rho >= n-1 = {n - 1}, got {rho}")
        if isinstance(rho, (int, Fraction)):
            r = Fraction(rho)
            return Fraction(self.poly(r)) / r**n
        return self.poly(float(rho)) / float(rho) ** n

    def __str__(self) -> str:
        return str(self.poly)


@lru_cache(maxsize=None)
def _error_poly(n: int, k: int) -> VolumePolynomial:
    out = VolumePolynomial.zero(n)
    for j in range(n - k, n):
        out = out + alpha_j(n, k, j) * vp_rules(n - 1 - j, j, n)
    return out


def error_polynomial(code: CodeParams) -> ErrorPolynomial:
    """``e(rho) = sum_{j=n-k}^{n-1} alpha_j(n, k) v_{n-1-j, j}`` with ``s = n``."""
    if code.n > MAX_N:
        raise ValueError(f"n={code.n} exceeds the supported maximum {MAX_N}")
    return ErrorPolynomial(code, _error_poly(code.n, code.k))


def _to_float_or_fraction(x):
    return x if isinstance(x, (int, Fraction)) else float(x)


def avoidance_loss_upper(code: CodeParams, m: Sequence[int], rho) -> float:
    """Upper bound ``1 - (1 - vol(R)/t**n) ** prod(m)`` on loss given counts ``m``.

    Every disk must fail at least once. For ``m = (1, ..., 1)`` this is the
    exact loss probability.
    """
    if len(m) != code.n:
        raise ValueError(f"expected {code.n} failure counts, got {len(m)}")
    if any(x < 1 for x in m):
        raise ValueError("every disk needs at least one failure; decompose by failed-disk subsets")
    p_eps = error_polynomial(code).error_probability(_to_float_or_fraction(rho))
    return float(1 - (1 - p_eps) ** math.prod(m))


def poisson_avoidance_upper(code: CodeParams, lam: float, t: float, t_rep: float) -> float:
    """Upper bound on loss for per-disk Poisson(``lam``) failures over ``[0, t]``.

    Sums over the number ``j`` of disks that fail at least once; those disks
    form a ``(j, j - (n - k))`` code whose error polynomial bounds the loss.
    """
    if lam <= 0 or t <= 0 or t_rep < 0:
        raise ValueError("need lam > 0, t > 0, t_rep >= 0")
    n, r = code.n, code.redundancy
    if t_rep > 0 and t < (n - 1) * t_rep:
        raise ValidityDomainError(f"need t >= (n-1) t_rep; got t={t}, t_rep={t_rep}")
    if t_rep == 0:
        return 0.0
    lt = lam * t
    rho = t / t_rep
    total = 0.0
    for j in range(r + 1, n + 1):
        sub = CodeParams(j, j - r)
        vol_ratio = error_polynomial(sub).poly(rho) / rho**j
        total += binomial(n, j) * math.exp(-lt * (n - j)) * lt**j * vol_ratio
    return total


def multiplicative_gap(code: CodeParams, lambda_t: float) -> float:
    """Asymptotic ratio ``(exp(-lt) + lt) ** (k - 1)`` of the Poisson bound to the true loss."""
    if lambda_t <= 0:
        raise ValueError("lambda_t must be positive")
    return (math.exp(-lambda_t) + lambda_t) ** (code.k - 1)


def second_order_avoidance_upper(
    p_eps: float, eq1_sq: float, eq2_sq: float, m1: int, m2: int
) -> float:
    """Second-order upper bound on the avoidance probability for two failure sets.

    ``p_eps`` is the chance that a single pair lands in the error region and
    ``eq1_sq``, ``eq2_sq`` are the second moments of the conditional error
    probabilities seen from either coordinate.
    """
    if not 0 <= p_eps <= 1:
        raise ValueError("p_eps must lie in [0, 1]")
    if eq1_sq < 0 or eq2_sq < 0:
        raise ValueError("second moments must be nonnegative")
    if m1 < 0 or m2 < 0:
        raise ValueError("counts must be nonnegative")
    c1, c2 = binomial(m1, 2), binomial(m2, 2)
    return (
        1
        - m1 * m2 * p_eps
        + 2 * c1 * c2 * p_eps**2
        + m2 * c1 * eq1_sq
        + m1 * c2 * eq2_sq
    )
