import math

import numpy as np
import pytest

from omegak.bessel import (
    OmegaQuery,
    gn_normalization_integral,
    omega_tilde,
    omega_tilde_deriv,
    omega_tilde_oracle,
    omega_tilde_via_sqrt_substitution,
)
from omegak.expcore import FamilyIndex
from omegak.quadrature import QuadratureConfig, QuadratureError, adaptive_quadrature


def test_quadrature_polynomial_exact():
    def f(u):
        return u * u, np.zeros_like(u)

    res = adaptive_quadrature(f, 0.0, 1.0, QuadratureConfig())
    assert res.value == pytest.approx(1.0 / 3.0, abs=1e-14)
    assert res.quad_err < 1e-12


def test_quadrature_honors_breakpoints():
    # |u - 1/3| has a kink; the seeded breakpoint gets it exactly
    def f(u):
        return np.abs(u - 1.0 / 3.0), np.zeros_like(u)

    res = adaptive_quadrature(f, 0.0, 1.0, QuadratureConfig(), breakpoints=(1.0 / 3.0,))
    exact = (1.0 / 3.0) ** 2 / 2 + (2.0 / 3.0) ** 2 / 2
    assert res.value == pytest.approx(exact, abs=1e-13)


def test_quadrature_reports_failure_with_best_estimate():
    def f(u):
        return 1.0 / np.sqrt(np.abs(u) + 1e-300), np.zeros_like(u)

    with pytest.raises(QuadratureError) as exc:
        adaptive_quadrature(f, 0.0, 1.0, QuadratureConfig(abs_tol=1e-300, rel_tol=1e-16, max_subdivisions=4))
    assert exc.value.best is not None
    assert math.isfinite(exc.value.best.value)


def test_known_value_anchors():
    # omegatilde_0(1) = K_0(1), omegatilde_1(1) = K_1(1)
    r0 = omega_tilde(OmegaQuery(FamilyIndex(0, 0), 1.0))
    r1 = omega_tilde(OmegaQuery(FamilyIndex(1, 0), 1.0))
    assert r0.value == pytest.approx(0.4210244382407085, rel=1e-11)
    assert r1.value == pytest.approx(0.6019072301972346, rel=1e-11)


def test_quadrature_agrees_with_k_series_oracle():
    for n in (0, 1, 4, 11, 33):
        for x in (0.05, 0.7, 3.0, 15.0, 60.0):
            q = OmegaQuery(FamilyIndex(n, 0), x)
            quad = omega_tilde(q)
            oracle = omega_tilde_oracle(q)
            assert abs(quad.value - oracle) <= quad.abs_err + 1e-13 * abs(oracle), (n, x)


def test_sqrt_substitution_route_agrees():
    for n in (0, 2, 9):
        for x in (0.2, 1.0, 8.0):
            q = OmegaQuery(FamilyIndex(n, 0), x)
            a = omega_tilde(q)
            b = omega_tilde_via_sqrt_substitution(q)
            assert abs(a.value - b.value) <= a.abs_err + b.abs_err, (n, x)


def test_first_derivative_matches_central_difference():
    for n in (0, 3, 10):
        for x in (0.8, 2.0, 12.0):
            h = 1e-5 * max(1.0, x)
            d = omega_tilde_deriv(OmegaQuery(FamilyIndex(n, 1), x))
            fp = omega_tilde(OmegaQuery(FamilyIndex(n, 0), x + h)).value
            fm = omega_tilde(OmegaQuery(FamilyIndex(n, 0), x - h)).value
            fd = (fp - fm) / (2 * h)
            # O(h^2) truncation dominates the tolerance
            scale = abs(d.value) + abs(fd) + 1.0
            assert d.value == pytest.approx(fd, abs=1e-7 * scale), (n, x)


def test_omega_positive_and_decaying():
    xs = np.geomspace(0.1, 50.0, 30)
    vals = [omega_tilde(OmegaQuery(FamilyIndex(0, 0), float(x))).value for x in xs]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_derivative_signs_alternate_for_n0():
    # K_0 derivatives alternate sign: (-1)^m K_0^(m) > 0
    for m in (0, 1, 2, 3):
        r = omega_tilde_deriv(OmegaQuery(FamilyIndex(0, m), 2.0))
        assert (-1) ** m * r.value > 0


def test_normalization_integral():
    for n in (0, 5, 34):
        assert gn_normalization_integral(n) == pytest.approx(1.0, abs=1e-11)


def test_rejects_nonpositive_x():
    with pytest.raises(ValueError):
        OmegaQuery(FamilyIndex(0, 0), 0.0)
    with pytest.raises(ValueError):
        OmegaQuery(FamilyIndex(0, 0), -1.0)
