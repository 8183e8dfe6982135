import math

import numpy as np
import pytest

from omegak.besselk import (
    bessel_k_log,
    bessel_k_oracle,
    omega_tilde_oracle_value,
)

scipy_special = pytest.importorskip("scipy.special")


@pytest.mark.parametrize("x", [0.05, 0.5, 1.0, 1.9, 2.1, 5.0, 12.0, 29.0, 31.0, 60.0, 80.0])
@pytest.mark.parametrize("order", [0, 1, 2, 5, 20])
def test_oracle_matches_scipy(order, x):
    ours = bessel_k_oracle(order, x)
    ref = float(scipy_special.kv(order, x))
    assert ours == pytest.approx(ref, rel=2e-12)


def test_oracle_monotone_decreasing_in_x():
    xs = np.linspace(0.2, 40.0, 120)
    vals = [bessel_k_oracle(0, float(x)) for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_oracle_increasing_in_order():
    # K_nu(x) grows with nu for fixed x
    for x in (0.5, 3.0, 20.0):
        vals = [bessel_k_oracle(nu, x) for nu in range(6)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


def test_log_variant_consistent_with_direct():
    for order in (0, 3, 15):
        for x in (0.3, 2.5, 40.0):
            lg = bessel_k_log(order, x)
            assert lg == pytest.approx(math.log(bessel_k_oracle(order, x)), abs=1e-11)


def test_log_variant_survives_overflow_regime():
    # K_60(0.1) overflows double but its log is finite
    lg = bessel_k_log(60, 0.1)
    assert math.isfinite(lg)
    ref = float(scipy_special.kv(60, 0.1))
    assert math.isinf(ref) or lg == pytest.approx(math.log(ref), rel=1e-10)


def test_omega_oracle_base_cases():
    # omegatilde_0 = K_0, omegatilde_1(x) = (x/2)(K_0 + K_2)/1! ... n=1 sum gives K_1-like value
    for x in (0.5, 1.0, 4.0):
        assert omega_tilde_oracle_value(0, x) == pytest.approx(bessel_k_oracle(0, x), rel=1e-13)


def test_omega_oracle_binomial_sum_explicit():
    # n = 2: (x/2)^2 / 2! * (K_2 + 2 K_0 + K_2)
    x = 3.0
    expected = (x / 2.0) ** 2 / 2.0 * (2 * bessel_k_oracle(2, x) + 2 * bessel_k_oracle(0, x))
    assert omega_tilde_oracle_value(2, x) == pytest.approx(expected, rel=1e-13)


def test_omega_oracle_positive_and_finite():
    for n in (0, 5, 40, 80):
        for x in (0.01, 1.0, 30.0, 80.0):
            v = omega_tilde_oracle_value(n, x)
            assert v > 0 and math.isfinite(v)
