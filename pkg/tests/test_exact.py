import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecrel.avoidance import error_polynomial
from ecrel.code import CodeParams
from ecrel.errors import EnumerationGuardError, ValidityDomainError
from ecrel.exact import (
    asymptotic_loss,
    chen_estimate,
    exact_loss,
    loss_21_closed,
    loss_polynomial,
    pattern_polynomial,
    poisson_asymptotic,
    transition_distribution,
)

from oracles import exact_loss_oracle, poisson_pmf

C42 = CodeParams(4, 2)
C21 = CodeParams(2, 1)


def test_code_params():
    assert C42.redundancy == 2
    assert str(C42) == "(4,2)"
    for bad in [(2, 2), (3, 0), (2, 3)]:
        with pytest.raises(ValueError):
            CodeParams(*bad)
    with pytest.raises(TypeError):
        CodeParams(4.0, 2)


def test_one_failure_per_disk_4_2():
    rho = Fraction(10)
    assert exact_loss(C42, (1, 1, 1, 1), rho=rho) == Fraction(24 * 100 - 720 + 64, 10**4)
    assert str(loss_polynomial(C42, (1, 1, 1, 1))) == "576rho^2 - 1728rho + 1536"


def test_single_pattern_polynomials():
    assert str(pattern_polynomial(C42, (1, 2, 3, 4))) == "24rho^2 - 72rho + 64"
    # Two leading free gaps sum out, leaving the s = 6 version of the same shape.
    assert str(pattern_polynomial(C42, (1, 2, 1, 2, 3, 4))) == (
        "60rho^4 - 360rho^3 + 960rho^2 - 1260rho + 664"
    )
    assert pattern_polynomial(C42, (1, 1, 2, 2)) == pattern_polynomial(C42, (1, 1, 2, 2)).zero(4)
    with pytest.raises(ValueError):
        pattern_polynomial(C42, (1, 5))


def test_band_area_for_2_1():
    for tau in (Fraction(1, 10), Fraction(1, 3), Fraction(1, 100)):
        assert exact_loss(C21, (1, 1), tau=tau) == 1 - (1 - tau) ** 2


def test_too_few_disks_gives_zero():
    assert exact_loss(C42, (3, 2, 0, 0), rho=20) == 0
    assert exact_loss(C42, (0, 0, 0, 0), rho=20) == 0


@pytest.mark.parametrize(
    "n,k,m,rho",
    [
        (2, 1, (2, 1), 5),
        (3, 1, (1, 2, 1), 7),
        (3, 2, (2, 1, 1), Fraction(9, 2)),
        (4, 2, (2, 1, 1, 1), 6),
        (4, 3, (1, 1, 2, 1), 8),
        (4, 1, (1, 1, 1, 2), 5),
        (5, 3, (1, 1, 1, 1, 1), 4),
    ],
)
def test_matches_independent_oracle(n, k, m, rho):
    assert exact_loss(CodeParams(n, k), m, rho=rho) == exact_loss_oracle(n, k, m, rho)


def test_validity_domain_and_guard():
    with pytest.raises(ValidityDomainError):
        exact_loss(C42, (1, 1, 1, 1), rho=2)
    exact_loss(C42, (1, 1, 1, 1), rho=3)
    with pytest.raises(EnumerationGuardError):
        exact_loss(C42, (4, 4, 4, 3), rho=100)
    with pytest.raises(ValueError):
        exact_loss(C42, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        exact_loss(C42, (1, 1, 1, 1), rho=10, tau=Fraction(1, 5))
    with pytest.raises(ValueError):
        exact_loss(C42, (1, 1, 1), rho=10)


def test_transition_distribution_is_a_distribution():
    for m1 in range(0, 6):
        for m2 in range(0, 6):
            dist = transition_distribution(m1, m2)
            assert sum(dist.values()) == 1
            if m1 + m2 >= 1:
                labels = [1] * m1 + [2] * m2
                arrangements = set(itertools.permutations(labels))
                mean = Fraction(
                    sum(sum(a != b for a, b in zip(p, p[1:])) for p in arrangements), len(arrangements)
                )
                assert sum(j * p for j, p in dist.items()) == mean


@pytest.mark.parametrize("m1,m2", [(a, b) for a in range(5) for b in range(5)])
@pytest.mark.parametrize("tau", [Fraction(1, 100), Fraction(1, 50)])
def test_21_closed_form(m1, m2, tau):
    assert exact_loss(C21, (m1, m2), tau=tau) == loss_21_closed(m1, m2, tau)


def test_21_closed_form_edges():
    assert loss_21_closed(1, 1, Fraction(1, 7)) == 1 - (1 - Fraction(1, 7)) ** 2
    assert loss_21_closed(3, 2, 0) == 0
    with pytest.raises(ValueError):
        loss_21_closed(3, 3, Fraction(1, 4))


@pytest.mark.parametrize("m1,m2", [(a, b) for a in range(1, 5) for b in range(1, 5)])
def test_21_small_tau_expansion(m1, m2):
    # P / tau = s E[xi] - C(s,2) E[xi^2] tau + O(tau^2), and s E[xi] = 2 m1 m2.
    s = m1 + m2
    dist = transition_distribution(m1, m2)
    mean = sum(j * p for j, p in dist.items())
    second = sum(j**2 * p for j, p in dist.items())
    third = sum(j**3 * p for j, p in dist.items())
    assert s * mean == 2 * m1 * m2
    for tau in (Fraction(1, 1000), Fraction(1, 10000)):
        slope = exact_loss(C21, (m1, m2), tau=tau) / tau
        predicted = s * mean - math.comb(s, 2) * second * tau
        # Alternating binomial series: the error is at most the next term.
        assert abs(slope - predicted) <= math.comb(s, 3) * third * tau**2
    slope = float(exact_loss(C21, (m1, m2), tau=Fraction(1, 10000)) / Fraction(1, 10000))
    assert slope == pytest.approx(2 * m1 * m2, rel=0.01)


@pytest.mark.parametrize(
    "n,k,m",
    [
        (4, 2, (1, 1, 1, 1)),
        (4, 2, (2, 1, 1, 1)),
        (4, 2, (2, 2, 1, 1)),
        (5, 3, (1, 1, 1, 1, 1)),
        (3, 1, (2, 2, 2)),
        (3, 2, (3, 2, 1)),
    ],
)
def test_asymptotic_convergence(n, k, m):
    code = CodeParams(n, k)
    coef = asymptotic_loss(code, m)
    devs = [
        abs(float(exact_loss(code, m, rho=rho) * Fraction(rho) ** (n - k)) / coef - 1)
        for rho in (10**2, 10**3, 10**4)
    ]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 0.01


def test_asymptotic_values():
    assert asymptotic_loss(C42, (1, 1, 1, 1)) == 24
    assert asymptotic_loss(C21, (2, 3)) == 12
    assert asymptotic_loss(C42, (5, 5, 0, 0)) == 0


def test_exact_loss_bounds_and_monotone_in_rho():
    for m in [(1, 1, 1, 1), (2, 1, 0, 1), (2, 1, 1, 1)]:
        s = sum(m)
        values = [exact_loss(C42, m, rho=r) for r in range(max(s - 1, 1), 40)]
        assert all(0 <= v <= 1 for v in values)
        assert all(a >= b for a, b in zip(values, values[1:]))


def test_single_failures_match_error_polynomial():
    for n in range(2, 6):
        for k in range(1, n):
            code = CodeParams(n, k)
            e = error_polynomial(code)
            for rho in (n - 1, n + 2, 17):
                rho = Fraction(rho)
                assert exact_loss(code, (1,) * n, rho=rho) * rho**n == e(rho)


def test_poisson_average_of_asymptotic_coefficient():
    code = C42
    lam, t = 0.7, 1.3
    mean = lam * t
    total = 0.0
    tail = 1 - sum(poisson_pmf(mean, c) for c in range(21))
    assert tail < 1e-12
    for m in itertools.product(range(21), repeat=code.n):
        weight = math.prod(poisson_pmf(mean, c) for c in m)
        if weight < 1e-30:
            continue
        # P_m ~ coef * t_rep**(n-k) / t**(n-k), so divide the count average by t**(n-k).
        total += weight * asymptotic_loss(code, m)
    assert total / t ** code.redundancy == pytest.approx(poisson_asymptotic(code, lam, t), rel=1e-9)


def test_poisson_asymptotic_values():
    assert poisson_asymptotic(C42, 1.0, 1.0) == 24.0
    assert poisson_asymptotic(C21, 0.3, 2.0) == pytest.approx(2 * 0.09 * 2.0)


def test_chen():
    est = chen_estimate(C42, 1.0, 0.1, 1.0)
    assert est.mttdl == pytest.approx(1 / (24 * 0.01))
    assert est.p_loss == pytest.approx(poisson_asymptotic(C42, 1.0, 1.0) * 0.1**2)
    tiny = chen_estimate(C42, 1e-9, 0.1, 1.0)
    assert tiny.mttdl > 1e25 and tiny.p_loss < 1e-25
    with pytest.raises(ValueError):
        chen_estimate(C42, 0.0, 0.1, 1.0)


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.integers(0, 2), min_size=3, max_size=3),
    st.integers(1, 2),
    st.fractions(min_value=6, max_value=50),
)
def test_loss_is_a_probability(m, k, rho):
    code = CodeParams(3, k)
    p = exact_loss(code, m, rho=rho)
    assert 0 <= p <= 1
