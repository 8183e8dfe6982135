"""High-accuracy evaluation of the scaled K_0-derivative family.

omega_tilde(n, x) = (-x)^n K_0^(n)(x) / n! has the integral representation

    omega_tilde_n^(m)(x) = x^{-m} integral_x^inf t^m g_n^(m)(t) / sqrt(t^2 - x^2) dt.

The substitution t = x cosh(u) removes the endpoint singularity exactly and
turns the integrand into cosh(u)^m g_n^(m)(x cosh u), which is smooth; the
semi-infinite range is truncated where the certified exponential-decay tail
bound of g_n drops below a tenth of the absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .besselk import omega_tilde_oracle_value
from .expcore import (
    EvalResult,
    FamilyIndex,
    _gn_log_arr,
    _tm_gn_deriv_arr,
)
from .quadrature import QuadratureConfig, QuadratureError, adaptive_quadrature

__all__ = [
    "OmegaQuery",
    "omega_tilde",
    "omega_tilde_deriv",
    "omega_tilde_oracle",
    "omega_tilde_via_sqrt_substitution",
    "gn_normalization_integral",
]


@dataclass(frozen=True)
class OmegaQuery:
    idx: FamilyIndex
    x: float

    def __post_init__(self) -> None:
        if not self.x > 0:
            raise ValueError(f"x must be positive, got {self.x}")


def _tail_bound(n: int, m: int, x: float, u: float) -> float:
    """Upper bound for the truncated tail of the cosh-substituted integral.

    Uses |t^m g_n^(m)(t)| <= g_n(t) (t + n)^m <= (2t)^m g_n(t) for t >= n and
    the decay bound g_n(t) <= exp(sqrt(n) - t/(1+sqrt(n))) / sqrt(n+1).
    """
    t_c = x * math.cosh(u)
    if t_c < max(n + math.sqrt(n), n, 1.0):
        return math.inf
    beta = 1.0 / (1.0 + math.sqrt(n))
    if beta * t_c <= m + 1:
        return math.inf
    # integral_{t_c}^inf t^m e^{-beta t} dt <= t_c^m e^{-beta t_c} / beta
    #     * 1 / (1 - m / (beta t_c))
    log_head = (
        math.sqrt(n)
        - 0.5 * math.log(n + 1.0)
        + m * math.log(2.0 * t_c / x)
        - beta * t_c
        - math.log(beta)
        - math.log(1.0 - m / (beta * t_c))
    )
    root = math.sqrt(max(t_c * t_c - x * x, t_c * t_c * 1e-12))
    return math.exp(log_head) / root


def _choose_u_max(n: int, m: int, x: float, tail_target: float, cfg: QuadratureConfig) -> float:
    fixed = cfg.fixed_u_max()
    if fixed is not None:
        return fixed
    u = max(1.0, math.acosh(max((n + math.sqrt(n) + 1.0) / x, 1.0 + 1e-12)))
    for _ in range(200):
        if _tail_bound(n, m, x, u) <= tail_target:
            return u
        u *= 1.25
    from .quadrature import QuadResult

    raise QuadratureError(
        f"could not certify truncation for (n={n}, m={m}, x={x})",
        QuadResult(math.nan, math.inf, math.inf, math.nan, 0),
    )


def _breakpoints(n: int, x: float, u_max: float) -> tuple[float, ...]:
    # seed panel edges where the integrand structure lives: near the lower
    # endpoint and around the peak of g_n at t ~ n
    knots_t = [x * 1.0005, x + 1.0, 2.0 * x]
    rt = math.sqrt(n)
    for t in (n - 3.0 * rt, n - rt, float(n), n + rt, n + 3.0 * rt, n + 9.0 * rt):
        knots_t.append(t)
    out = []
    for t in knots_t:
        if t > x:
            u = math.acosh(t / x)
            if 0.0 < u < u_max:
                out.append(u)
    # a few dyadic points to keep the first panel set balanced
    out.extend(u_max * f for f in (0.25, 0.5, 0.75))
    return tuple(out)


def omega_tilde(q: OmegaQuery, cfg: QuadratureConfig | None = None) -> EvalResult:
    """omega_tilde_n(x) (m = 0) by singularity-removed adaptive quadrature."""
    if q.idx.m != 0:
        raise ValueError("omega_tilde handles m = 0; use omega_tilde_deriv")
    return omega_tilde_deriv(q, cfg)


def omega_tilde_deriv(q: OmegaQuery, cfg: QuadratureConfig | None = None) -> EvalResult:
    """m-th derivative of omega_tilde_n at x, with aggregated error estimate.

    The integrand is evaluated through the delta-expansion route of
    g_n^(m); its pointwise error estimates are integrated alongside the
    value and folded into ``abs_err`` together with the quadrature error
    estimate and the truncation bound.
    """
    if cfg is None:
        cfg = QuadratureConfig()
    n, m, x = q.idx.n, q.idx.m, q.x
    tail_target = cfg.abs_tol / 10.0
    u_max = _choose_u_max(n, m, x, tail_target, cfg)
    tail = 0.0 if cfg.fixed_u_max() is not None else _tail_bound(n, m, x, u_max)

    if m == 0:
        def f(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            t = x * np.cosh(u)
            vals = np.exp(_gn_log_arr(n, t))
            rel = np.finfo(float).eps * (np.abs(n * np.log(t)) + t
                                         + abs(math.lgamma(n + 1)) + 4.0)
            return vals, vals * rel
    else:
        inv_xm = math.exp(-m * math.log(x))

        def f(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            t = x * np.cosh(u)
            # cosh^m(u) g_n^(m)(t) = t^m g_n^(m)(t) / x^m
            tm_g, err = _tm_gn_deriv_arr(n, m, t)
            return tm_g * inv_xm, err * inv_xm

    res = adaptive_quadrature(f, 0.0, u_max, cfg, breakpoints=_breakpoints(n, x, u_max))
    abs_err = res.quad_err + res.integrand_err + tail
    return EvalResult.from_sum(res.value, abs_err, res.abs_integral)


def omega_tilde_oracle(q: OmegaQuery) -> float:
    """Independent cross-check value for omega_tilde (m = 0 only, n <= 80)."""
    if q.idx.m != 0:
        raise ValueError("oracle defined for m = 0 only")
    return omega_tilde_oracle_value(q.idx.n, q.x)


def omega_tilde_via_sqrt_substitution(q: OmegaQuery, cfg: QuadratureConfig | None = None) -> EvalResult:
    """omega_tilde_n(x) via the alternative substitution t = x + v^2.

    Second quadrature route used by the scaling-identity checks: the
    1/sqrt(t^2 - x^2) singularity turns into 1/sqrt(2x + v^2), which is
    smooth.
    """
    if q.idx.m != 0:
        raise ValueError("sqrt-substitution route handles m = 0 only")
    if cfg is None:
        cfg = QuadratureConfig()
    n, x = q.idx.n, q.x
    # truncate where the decay bound certifies the tail: t = x + v^2
    beta = 1.0 / (1.0 + math.sqrt(n))
    t_max = max(x + 1.0, n + math.sqrt(n),
                (1.0 + math.sqrt(n)) * (math.sqrt(n) + math.log(20.0 / (beta * cfg.abs_tol))))
    v_max = math.sqrt(t_max - x)

    def f(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = x + v * v
        vals = 2.0 * np.exp(_gn_log_arr(n, np.maximum(t, 1e-300))) / np.sqrt(2.0 * x + v * v)
        rel = np.finfo(float).eps * (np.abs(n * np.log(t)) + t + abs(math.lgamma(n + 1)) + 8.0)
        return vals, vals * rel

    knots = tuple(
        math.sqrt(t - x) for t in (n - math.sqrt(n), float(n), n + math.sqrt(n), x + 1.0, 2.0 * x)
        if x < t < t_max
    )
    res = adaptive_quadrature(f, 0.0, v_max, cfg, breakpoints=knots)
    # tail: integral_{t_max}^inf g_n(t)/sqrt(t^2-x^2) dt
    tail = math.exp(math.sqrt(n) - beta * t_max) / (beta * math.sqrt(n + 1.0)
                                                    * math.sqrt(t_max * t_max - x * x))
    return EvalResult.from_sum(res.value, res.quad_err + res.integrand_err + tail,
                               res.abs_integral)


def gn_normalization_integral(n: int, cfg: QuadratureConfig | None = None) -> float:
    """integral_0^inf g_n(t) dt, which should equal 1 for every n."""
    if cfg is None:
        cfg = QuadratureConfig(abs_tol=1e-12, rel_tol=1e-11)
    beta = 1.0 / (1.0 + math.sqrt(n))
    t_max = (1.0 + math.sqrt(n)) * (math.sqrt(n) + math.log(20.0 / (beta * cfg.abs_tol)))

    def f(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        vals = np.exp(_gn_log_arr(n, np.maximum(t, 1e-300)))
        rel = np.finfo(float).eps * (np.abs(n * np.log(np.maximum(t, 1e-300)))
                                     + t + abs(math.lgamma(n + 1)) + 4.0)
        return vals, vals * rel

    rt = math.sqrt(n)
    knots = tuple(t for t in (n - 3 * rt, n - rt, float(n), n + rt, n + 3 * rt) if 0 < t < t_max)
    res = adaptive_quadrature(f, 1e-300, t_max, cfg, breakpoints=knots)
    # truncation tail is below abs_tol/20 by construction of t_max
    return res.value
