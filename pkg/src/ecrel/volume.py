"""Volumes of ordered point sets with constrained successive differences.

For ``0 <= x_1 <= ... <= x_s <= t`` and a constraint vector whose entries say
``x_{i+1} - x_i < t_rep`` (one), ``>= t_rep`` (zero) or nothing (star), the
scaled volume ``s! * vol / t_rep**s`` is a polynomial in ``rho = t / t_rep``
that depends only on the number of zeros ``i`` and ones ``j``. It is written
``v_ij`` throughout. Strict and non-strict inequalities differ on sets of
measure zero and are interchangeable here.

The polynomial equals the true scaled volume only once every constraint
pattern is feasible; ``rho >= s - 1`` is sufficient and is what callers
enforce before interpreting an evaluation as a volume.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ecrel.combinatorics import binomial, stirling2
from ecrel.estimate import SimEstimate

__all__ = [
    "VolumePolynomial",
    "mc_volume",
    "parse_constraints",
    "simplex_volume",
    "vp_closed",
    "vp_eval",
    "vp_rules",
    "vp_shift_form",
]


@dataclass(frozen=True)
class VolumePolynomial:
    """Dense integer polynomial in rho; ``coeffs[r]`` multiplies ``rho**r``."""

    s: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.s + 1:
            raise ValueError(f"expected {self.s + 1} coefficients, got {len(self.coeffs)}")

    @classmethod
    def power(cls, s: int, shift: int = 0) -> VolumePolynomial:
        """``(rho - shift) ** s`` expanded."""
        return cls(s, tuple(binomial(s, r) * (-shift) ** (s - r) for r in range(s + 1)))

    @classmethod
    def zero(cls, s: int) -> VolumePolynomial:
        return cls(s, (0,) * (s + 1))

    @property
    def degree(self) -> int:
        for r in range(self.s, -1, -1):
            if self.coeffs[r]:
                return r
        return -1

    @property
    def leading_coefficient(self) -> int:
        d = self.degree
        return self.coeffs[d] if d >= 0 else 0

    def shifted(self, c: int) -> VolumePolynomial:
        """The polynomial ``rho -> self(rho - c)``."""
        out = [0] * (self.s + 1)
        for r, a in enumerate(self.coeffs):
            if not a:
                continue
            for q in range(r + 1):
                out[q] += a * binomial(r, q) * (-c) ** (r - q)
        return VolumePolynomial(self.s, tuple(out))

    def __call__(self, rho):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * rho + a
        return acc

    def _check_dim(self, other: VolumePolynomial) -> None:
        if self.s != other.s:
            raise ValueError(f"dimension mismatch: s={self.s} vs s={other.s}")

    def __add__(self, other: VolumePolynomial) -> VolumePolynomial:
        self._check_dim(other)
        return VolumePolynomial(self.s, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: VolumePolynomial) -> VolumePolynomial:
        self._check_dim(other)
        return VolumePolynomial(self.s, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, c: int) -> VolumePolynomial:
        if not isinstance(c, int):
            return NotImplemented
        return VolumePolynomial(self.s, tuple(c * a for a in self.coeffs))

    __rmul__ = __mul__

    def __str__(self) -> str:
        terms = []
        for r in range(self.s, -1, -1):
            a = self.coeffs[r]
            if not a:
                continue
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            if r == 0:
                body = str(mag)
            else:
                body = ("" if mag == 1 else str(mag)) + ("rho" if r == 1 else f"rho^{r}")
            terms.append((sign, body))
        if not terms:
            return "0"
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _check_indices(i: int, j: int, s: int) -> None:
    if s < 1 or i < 0 or j < 0:
        raise ValueError(f"need s >= 1 and i, j >= 0; got i={i}, j={j}, s={s}")
    if i + j > s - 1:
        raise ValueError(f"{i + j} constraints do not fit in {s - 1} gaps (s={s})")


@lru_cache(maxsize=None)
def _rules(i: int, j: int, s: int) -> VolumePolynomial:
    if i == 0 and j == 0:
        return VolumePolynomial.power(s)
    if i > 0:
        # Shift: one more ">= t_rep" gap moves the polynomial right by one.
        return _rules(i - 1, j, s).shifted(1)
    # Difference: dropping a "< t_rep" gap splits its region into the "<" and ">=" halves.
    return _rules(0, j - 1, s) - _rules(1, j - 1, s)


def vp_rules(i: int, j: int, s: int) -> VolumePolynomial:
    """``v_ij`` built only from the shift, difference and initial-condition rules."""
    _check_indices(i, j, s)
    return _rules(i, j, s)


def vp_shift_form(i: int, j: int, s: int) -> VolumePolynomial:
    """``v_ij = sum_l (-1)**(j-l) C(j, l) (rho - i - j + l)**s``."""
    _check_indices(i, j, s)
    out = VolumePolynomial.zero(s)
    for l in range(j + 1):
        out = out + (-1) ** (j - l) * binomial(j, l) * VolumePolynomial.power(s, i + j - l)
    return out


def vp_closed(i: int, j: int, s: int) -> VolumePolynomial:
    """``v_ij`` from the Stirling-number coefficient formula.

    a_r = C(s, r) j! (-1)**(s-r+j) sum_m C(s-r, m) i**m S2(s-r-m, j)
    """
    _check_indices(i, j, s)
    coeffs = []
    for r in range(s + 1):
        inner = sum(binomial(s - r, m) * i**m * stirling2(s - r - m, j) for m in range(s - r + 1))
        coeffs.append(binomial(s, r) * math.factorial(j) * (-1) ** (s - r + j) * inner)
    return VolumePolynomial(s, tuple(coeffs))


def vp_eval(p: VolumePolynomial, rho):
    """Evaluate ``p`` at ``rho``; exact for ``int``/``Fraction`` input."""
    if isinstance(rho, (int, Fraction)):
        return Fraction(p(Fraction(rho)))
    return p(rho)


def simplex_volume(i: int, s: int, t: float, t_rep: float) -> float:
    """Volume of the ordered simplex with ``i`` gaps forced to be ``>= t_rep``."""
    if t < 0 or t_rep < 0:
        raise ValueError("durations must be nonnegative")
    if s < 1 or i < 0:
        raise ValueError("need s >= 1 and i >= 0")
    room = t - i * t_rep
    if room <= 0:
        return 0.0
    return room**s / math.factorial(s)


def parse_constraints(b: str | Sequence) -> list[int | None]:
    """Normalize a constraint vector; accepts ``"1*0"`` or ``[1, None, 0]``."""
    out: list[int | None] = []
    for ch in b:
        if ch in ("*", None):
            out.append(None)
        elif ch in ("0", 0, False):
            out.append(0)
        elif ch in ("1", 1, True):
            out.append(1)
        else:
            raise ValueError(f"bad constraint entry {ch!r}")
    return out


def mc_volume(
    b: str | Sequence,
    s: int,
    rho: float,
    trials: int,
    seed: int,
    *,
    chunk: int = 1 << 16,
) -> SimEstimate:
    """Monte Carlo estimate of ``s! * vol(R_b) / t_rep**s``.

    Samples ``s`` uniform points on ``[0, rho]`` (time measured in units of
    ``t_rep``), sorts them, and tests each gap constraint. The returned
    estimate has ``scale = rho**s`` so ``value`` is on the polynomial scale.
    Draws come from a Philox generator keyed by ``seed``, one stream per
    chunk, so results do not depend on how chunks are scheduled.
    """
    cons = parse_constraints(b)
    if len(cons) != s - 1:
        raise ValueError(f"constraint vector has length {len(cons)}, expected {s - 1}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ones = np.array([c == 1 for c in cons], dtype=bool)
    zeros = np.array([c == 0 for c in cons], dtype=bool)
    hits = 0
    done = 0
    block = 0
    while done < trials:
        size = min(chunk, trials - done)
        gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, block, 0]))
        x = np.sort(gen.random((size, s)) * rho, axis=1)
        gaps = np.diff(x, axis=1)
        ok = np.all(gaps[:, ones] < 1.0, axis=1) & np.all(gaps[:, zeros] >= 1.0, axis=1)
        hits += int(np.count_nonzero(ok))
        done += size
        block += 1
    return SimEstimate.from_counts(hits, trials, seed, scale=float(rho) ** s)
