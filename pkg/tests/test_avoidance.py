import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecrel.avoidance import (
    avoidance_loss_upper,
    error_polynomial,
    multiplicative_gap,
    poisson_avoidance_upper,
    second_order_avoidance_upper,
)
from ecrel.code import CodeParams
from ecrel.errors import ValidityDomainError
from ecrel.exact import exact_loss, poisson_asymptotic
from ecrel.volume import VolumePolynomial, mc_volume, vp_eval, vp_rules

C42 = CodeParams(4, 2)
C21 = CodeParams(2, 1)
ALL_CODES = [CodeParams(n, k) for n in range(2, 9) for k in range(1, n)]


def test_golden_4_2():
    assert str(error_polynomial(C42)) == "24rho^2 - 72rho + 64"


@pytest.mark.parametrize("n", range(2, 9))
def test_single_erasure_tolerant_codes(n):
    e = error_polynomial(CodeParams(n, n - 1)).poly
    assert e == VolumePolynomial.power(n) - VolumePolynomial.power(n, n - 1)
    assert e == vp_rules(0, 0, n) - vp_rules(n - 1, 0, n)


@pytest.mark.parametrize("code", ALL_CODES, ids=str)
def test_degree_and_leading_term(code):
    e = error_polynomial(code).poly
    assert e.degree == code.k
    assert e.leading_coefficient == math.factorial(code.n) // math.factorial(code.k - 1)


def test_volume_in_absolute_units_has_expected_leading_term():
    # vol R = t_rep**n e(t / t_rep); the t**k t_rep**(n-k) coefficient is n!/(k-1)!.
    for code in ALL_CODES:
        e = error_polynomial(code).poly
        assert e.coeffs[code.k] == math.factorial(code.n) // math.factorial(code.k - 1)


def test_error_probability_domain():
    e = error_polynomial(C42)
    assert e.error_probability(10) == Fraction(1744, 10**4)
    assert e.error_probability(10.0) == pytest.approx(0.1744)
    with pytest.raises(ValidityDomainError):
        e.error_probability(2)


@pytest.mark.parametrize("code", [CodeParams(3, 2), C42], ids=str)
def test_mc_volume_oracle(code, seed):
    # Sum the Monte Carlo volumes of every full error vector for the identity pattern.
    n = code.n
    rho = 2.0 * n
    exact = float(error_polynomial(code).error_probability(Fraction(int(rho))))
    total = 0.0
    var = 0.0
    for w in range(1 << (n - 1)):
        bits = [(w >> i) & 1 for i in range(n - 1)]
        run = best = 0
        for b in bits:
            run = run + 1 if b else 0
            best = max(best, run)
        if best >= code.redundancy:
            est = mc_volume("".join(map(str, bits)), n, rho, 200000, seed + w)
            total += est.value
            var += est.value_error**2
    assert abs(total / rho**n - exact) < 3 * math.sqrt(var) / rho**n


def test_upper_bound_equals_exact_for_single_failures():
    for code in [C21, CodeParams(3, 1), C42, CodeParams(5, 3)]:
        rho = Fraction(3 * code.n)
        m = (1,) * code.n
        assert avoidance_loss_upper(code, m, rho) == pytest.approx(float(exact_loss(code, m, rho=rho)), rel=1e-14)


def test_upper_bound_21_formula():
    tau = 0.01
    for m1, m2 in [(1, 1), (2, 3), (4, 1)]:
        expected = 1 - (1 - (2 * tau - tau**2)) ** (m1 * m2)
        assert avoidance_loss_upper(C21, (m1, m2), 1 / tau) == pytest.approx(expected, rel=1e-12)


def test_upper_bound_rejects_silent_disks():
    with pytest.raises(ValueError):
        avoidance_loss_upper(C42, (1, 1, 1, 0), 10)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.integers(1, 4), min_size=4, max_size=4),
    st.integers(0, 3),
    st.floats(3.0, 500.0),
    st.floats(1.0, 5.0),
)
def test_upper_bound_monotone(m, idx, rho, stretch):
    base = avoidance_loss_upper(C42, m, rho)
    more = list(m)
    more[idx] += 1
    assert avoidance_loss_upper(C42, more, rho) >= base
    # Larger tau means smaller rho.
    assert avoidance_loss_upper(C42, m, max(3.0, rho / stretch)) >= base - 1e-15


def test_conditional_bound_dominates_exact_loss():
    for m in [(2, 1, 1, 1), (2, 2, 1, 1), (3, 1, 2, 1)]:
        for rho in (Fraction(20), Fraction(50)):
            assert avoidance_loss_upper(C42, m, rho) >= float(exact_loss(C42, m, rho=rho))


def test_poisson_bound_21():
    lam, t, t_rep = 0.8, 1.0, 0.01
    tau = t_rep / t
    assert poisson_avoidance_upper(C21, lam, t, t_rep) == pytest.approx((lam * t) ** 2 * (2 * tau - tau**2))
    assert poisson_avoidance_upper(C21, lam, t, 0.0) == 0.0
    with pytest.raises(ValidityDomainError):
        poisson_avoidance_upper(C42, 1.0, 1.0, 0.5)


@pytest.mark.parametrize("code", [C21, CodeParams(3, 2), C42, CodeParams(6, 3)], ids=str)
@pytest.mark.parametrize("lt", [0.3, 1.0, 2.5])
def test_poisson_bound_gap_limit(code, lt):
    t = 1.0
    lam = lt / t
    t_rep = 1e-7
    ratio = poisson_avoidance_upper(code, lam, t, t_rep) / (
        poisson_asymptotic(code, lam, t) * t_rep**code.redundancy
    )
    assert ratio == pytest.approx(multiplicative_gap(code, lt), rel=1e-4)


def test_multiplicative_gap_values():
    assert multiplicative_gap(CodeParams(5, 1), 2.0) == 1.0
    assert multiplicative_gap(C42, 1.0) == pytest.approx(1 + math.exp(-1))
    assert multiplicative_gap(CodeParams(9, 6), 1e-9) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        multiplicative_gap(C42, 0.0)


def _q_second_moment(tau):
    # Q(x) = P(|x - y| < tau) for y uniform on [0, 1]; integrate Q(x)^2 over x.
    x = np.linspace(0.0, 1.0, 400001)
    q = np.minimum(x + tau, 1.0) - np.maximum(x - tau, 0.0)
    return float(np.trapezoid(q**2, x))


def test_second_order_edges():
    assert second_order_avoidance_upper(0.2, 0.1, 0.1, 1, 1) == pytest.approx(0.8)
    assert second_order_avoidance_upper(0.0, 0.0, 0.0, 3, 4) == 1.0
    with pytest.raises(ValueError):
        second_order_avoidance_upper(1.5, 0.0, 0.0, 1, 1)


@pytest.mark.parametrize("m1,m2", [(1, 2), (2, 2), (2, 3), (3, 3)])
def test_second_order_sandwich_21(m1, m2):
    tau = Fraction(1, 100)
    p_eps = float(2 * tau - tau**2)
    eq2 = _q_second_moment(float(tau))
    upper = second_order_avoidance_upper(p_eps, eq2, eq2, m1, m2)
    exact_avoid = 1 - float(exact_loss(C21, (m1, m2), tau=tau))
    jensen = (1 - p_eps) ** (m1 * m2)
    assert jensen <= exact_avoid + 1e-15
    assert exact_avoid <= upper + 1e-15
    # The example form with E[Q^2] replaced by its bound 4 tau^2 is looser still.
    loose = second_order_avoidance_upper(p_eps, 4 * float(tau) ** 2, 4 * float(tau) ** 2, m1, m2)
    assert loose >= upper
