import math
from fractions import Fraction

import numpy as np
import pytest

from omegak.expcore import (
    CANCELLATION_CAP,
    M_CAP,
    N_CAP,
    EvalResult,
    FamilyIndex,
    delta_expansion_build,
    double_factorial,
    gn_deriv_closed,
    gn_deriv_delta,
    gn_deriv_recursive,
    gn_eval,
    majorant_A,
    majorant_G,
    snm_eval_exact,
    snm_polynomial,
)


def test_family_index_caps():
    FamilyIndex(N_CAP, M_CAP)  # boundary ok
    with pytest.raises(ValueError):
        FamilyIndex(-1, 0)
    with pytest.raises(ValueError):
        FamilyIndex(0, M_CAP + 1)
    with pytest.raises(ValueError):
        FamilyIndex(N_CAP + 1, 0)


def test_gn_known_values():
    assert gn_eval(0, 1.3) == pytest.approx(math.exp(-1.3), rel=1e-15)
    assert gn_eval(3, 2.0) == pytest.approx(8.0 * math.exp(-2.0) / 6.0, rel=1e-14)
    assert gn_eval(0, 0.0) == 1.0
    assert gn_eval(5, 0.0) == 0.0
    # peak magnitude ~ 1/sqrt(2 pi n)
    assert gn_eval(100, 100.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi * 100), rel=2e-3)


def test_gn_normalized_tail_small():
    # g_n decays past n + sqrt(n)
    for n in (4, 25, 64):
        assert gn_eval(n, n + 10 * math.sqrt(n)) < gn_eval(n, float(n)) * 1e-3


def test_snm_polynomial_exact_values():
    # s_{n,0} = 1
    assert snm_eval_exact(3, 0, Fraction(7)) == 1
    # s_{0,m}(t) = (-t)^m (single l = 0 term)
    assert snm_eval_exact(0, 3, Fraction(2)) == -8
    # worked value: s_{7,4}(5) = 65
    assert snm_eval_exact(7, 4, Fraction(5)) == 65


def test_snm_matches_direct_binomial_sum():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(0, 12))
        m = int(rng.integers(0, 9))
        t = Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 7)))
        direct = sum(
            math.comb(m, l) * (-1) ** (m - l) * Fraction(math.factorial(n), math.factorial(n - l)) * t ** (m - l)
            for l in range(min(m, n) + 1)
        )
        assert snm_eval_exact(n, m, t) == direct


def test_delta_expansion_reproduces_snm():
    # stilde_{n,m}(delta) = (-1)^m s_{n,m}(n - delta), exact rational identity
    for n in (0, 1, 2, 7, 13):
        for m in (0, 1, 2, 5, 8):
            exp = delta_expansion_build(m)
            for delta in (Fraction(0), Fraction(5), Fraction(-3, 2), Fraction(n)):
                lhs = exp.stilde_exact(n, delta)
                rhs = (-1) ** m * snm_eval_exact(n, m, Fraction(n) - delta)
                assert lhs == rhs, (n, m, delta)


def test_delta_expansion_coefficient_examples():
    exp = delta_expansion_build(6)
    # c_{0,k} = delta_{0,k}; c_{1,k} = 1/k for k >= 2; c_{l,2l} = 1/(2^l l!)
    assert exp.coefficient_c(0, 0) == 1
    assert exp.coefficient_c(0, 2) == 0
    assert exp.coefficient_c(1, 3) == Fraction(1, 3)
    assert exp.coefficient_c(2, 4) == Fraction(1, 8)
    # all |c| <= 1
    for l in range(0, 4):
        for k in range(2 * l, 7):
            assert abs(exp.coefficient_c(l, k)) <= 1


def test_three_routes_agree_on_moderate_points():
    for (n, m, t) in [(0, 0, 0.5), (3, 2, 2.5), (10, 4, 9.0), (40, 6, 35.0), (25, 1, 30.0)]:
        idx = FamilyIndex(n, m)
        closed = gn_deriv_closed(idx, t)
        delta = gn_deriv_delta(idx, t)
        rec = gn_deriv_recursive(idx, t)
        assert abs(closed.value - delta.value) <= closed.abs_err + delta.abs_err
        # recursive route: differencing amplifies base roundoff by <= 2^m
        base = max(gn_eval(k, t) for k in range(max(n - m, 0), n + 1))
        rec_err = 2.0**m * base * 1e-14
        assert abs(rec - delta.value) <= rec_err + delta.abs_err


def test_recursive_rejects_large_orders():
    with pytest.raises(ValueError):
        gn_deriv_recursive(FamilyIndex(295, 10), 100.0)


def test_eval_result_cancellation_flag():
    r = EvalResult.from_sum(1e-9, 1e-12, abs_sum=10.0)
    assert r.cancellation == pytest.approx(1e10)
    assert r.cancellation > CANCELLATION_CAP and not r.reliable
    ok = EvalResult.from_sum(1.0, 1e-15, abs_sum=2.0)
    assert ok.reliable


def test_majorant_A_table():
    assert majorant_A(FamilyIndex(0, 5)) == 1.0
    assert majorant_A(FamilyIndex(1, 3)) == 3.0
    assert majorant_A(FamilyIndex(4, 0)) == pytest.approx(1.0 / math.sqrt(5.0))
    assert majorant_A(FamilyIndex(2, 2)) == pytest.approx(1.0 / math.sqrt(2.0))
    # the (1, 0) cell is row-order dependent
    assert majorant_A(FamilyIndex(1, 0)) == 0.0
    assert majorant_A(FamilyIndex(1, 0), first_match=False) == pytest.approx(1.0 / math.sqrt(2.0))


def test_majorant_A_bounds_derivatives_on_central_band():
    # |g_n^(m)| <= A_n^(m) on [n - sqrt(n), n + sqrt(n)], checked empirically
    # with the row-precedence variant except at its degenerate (1, 0) cell
    for n in (2, 5, 10, 40):
        for m in (0, 1, 2, 4):
            a = majorant_A(FamilyIndex(n, m))
            rt = math.sqrt(n)
            for t in np.linspace(n - rt, n + rt, 9):
                val = gn_deriv_delta(FamilyIndex(n, m), float(t))
                assert abs(val.value) <= a * (1 + 1e-9) + val.abs_err, (n, m, t)


def test_majorant_G():
    assert majorant_G(FamilyIndex(1, 3)) == pytest.approx(4.0)
    assert majorant_G(FamilyIndex(2, 5)) == pytest.approx(16.0)
    # defined only on n < m/2
    with pytest.raises(ValueError):
        majorant_G(FamilyIndex(3, 5))
    with pytest.raises(ValueError):
        majorant_G(FamilyIndex(1, 2))


def test_double_factorial_conventions():
    assert double_factorial(-1) == 1
    assert double_factorial(0) == 1
    assert double_factorial(1) == 1
    assert double_factorial(6) == 48
    assert double_factorial(7) == 105
    with pytest.raises(ValueError):
        double_factorial(-2)
