"""Independent evaluation of the modified Bessel functions K_nu (integer nu).

This module is the oracle side of the evaluator pair: it never touches the
quadrature code.  K_0 and K_1 come from the classical ascending series for
x <= 2 (plain doubles), from the same series carried in high-precision
arithmetic for 2 < x < 30 (the series converges everywhere; the extra digits
absorb the e^{2x} cancellation against the log term), and from the large-x
asymptotic expansion for x >= 30 where its optimal truncation is far below
double roundoff.  Higher integer orders follow by the stable upward
recurrence K_{nu+1} = K_{nu-1} + (2 nu / x) K_nu, carried in log space to
dodge overflow at small x.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from mpmath import mp

__all__ = [
    "bessel_k_oracle",
    "bessel_k_log",
    "omega_tilde_oracle_value",
    "K_ORDER_CAP",
    "SERIES_X_MAX",
    "ASYMPTOTIC_X_MIN",
]

K_ORDER_CAP = 80
SERIES_X_MAX = 2.0
ASYMPTOTIC_X_MIN = 30.0

_EULER_GAMMA = 0.5772156649015328606


def _k0_k1_series(x: float) -> tuple[float, float]:
    """Ascending series for K_0 and K_1 in plain doubles (0 < x <= 2.2)."""
    q = x * x / 4.0
    lg = math.log(x / 2.0)
    # I_0, I_1 and the psi-weighted companion sums share the term recurrences.
    term0 = 1.0
    i0 = 1.0
    s0 = 0.0       # sum_{k>=1} q^k / (k!)^2 * H_k
    hk = 0.0
    term1 = 1.0    # q^k / (k! (k+1)!)
    i1 = 1.0
    s1 = 1.0       # sum_k [psi(k+1)+psi(k+2)] shifted: we track H_k + H_{k+1}
    h_pair = 1.0   # H_k + H_{k+1} at k = 0
    for k in range(1, 200):
        term0 *= q / (k * k)
        hk += 1.0 / k
        i0 += term0
        s0 += term0 * hk
        term1 *= q / (k * (k + 1))
        h_pair += 1.0 / k + 1.0 / (k + 1)
        i1 += term1
        s1 += term1 * h_pair
        if term0 < 1e-19 * i0 and term1 < 1e-19 * i1:
            break
    k0 = -(lg + _EULER_GAMMA) * i0 + s0
    # K_1(x) = ln(x/2) I_1(x) + 1/x - (x/4) sum_k [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
    # with psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}.
    i1 *= x / 2.0
    k1 = lg * i1 + 1.0 / x - (x / 4.0) * (s1 - 2.0 * _EULER_GAMMA * (i1 / (x / 2.0)))
    return k0, k1


def _k0_k1_series_mp(x: float) -> tuple[float, float]:
    """Ascending series in high-precision arithmetic (any x > 0)."""
    extra = int(x) + 25
    with mp.workdps(extra):
        xm = mp.mpf(x)
        q = xm * xm / 4
        lg = mp.log(xm / 2)
        term0 = mp.mpf(1)
        i0 = mp.mpf(1)
        s0 = mp.mpf(0)
        hk = mp.mpf(0)
        term1 = mp.mpf(1)
        i1s = mp.mpf(1)
        s1 = mp.mpf(1)
        h_pair = mp.mpf(1)
        for k in range(1, 100000):
            term0 *= q / (k * k)
            hk += mp.mpf(1) / k
            i0 += term0
            s0 += term0 * hk
            term1 *= q / (k * (k + 1))
            h_pair += mp.mpf(1) / k + mp.mpf(1) / (k + 1)
            i1s += term1
            s1 += term1 * h_pair
            if term0 < mp.mpf(10) ** (-extra) * i0:
                break
        gamma = mp.euler
        k0 = -(lg + gamma) * i0 + s0
        i1 = i1s * xm / 2
        k1 = lg * i1 + 1 / xm - (xm / 4) * (s1 - 2 * gamma * i1s)
        return float(k0), float(k1)


def _k_asymptotic(nu: int, x: float) -> float:
    """Large-x asymptotic expansion of K_nu, truncated at the smallest term."""
    mu = 4 * nu * nu
    total = 1.0
    term = 1.0
    prev = math.inf
    for k in range(1, 60):
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
        if abs(term) < 1e-18 * abs(total):
            break
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * total


def _k0_k1(x: float) -> tuple[float, float]:
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    if x <= SERIES_X_MAX:
        return _k0_k1_series(x)
    if x >= ASYMPTOTIC_X_MIN:
        return _k_asymptotic(0, x), _k_asymptotic(1, x)
    return _k0_k1_series_mp(x)


def bessel_k_oracle(order: int, x: float) -> float:
    """K_order(x) to relative ~1e-12 for integer order <= 80.

    Values beyond double range (large order, small x) return inf; use
    ``bessel_k_log`` for a stable logarithmic value in that regime.
    """
    if order < 0 or order > K_ORDER_CAP:
        raise ValueError(f"order must be in [0, {K_ORDER_CAP}], got {order}")
    k_prev, k_cur = _k0_k1(x)
    if order == 0:
        return k_prev
    for nu in range(1, order):
        k_prev, k_cur = k_cur, k_prev + (2.0 * nu / x) * k_cur
        if math.isinf(k_cur):
            return math.inf
    return k_cur


def bessel_k_log(order: int, x: float) -> float:
    """ln K_order(x), carried through the upward recurrence in log space."""
    if order < 0 or order > K_ORDER_CAP:
        raise ValueError(f"order must be in [0, {K_ORDER_CAP}], got {order}")
    k0, k1 = _k0_k1(x)
    lk_prev, lk_cur = math.log(k0), math.log(k1)
    if order == 0:
        return lk_prev
    for nu in range(1, order):
        lk_prev, lk_cur = lk_cur, np.logaddexp(lk_prev, math.log(2.0 * nu / x) + lk_cur)
    return float(lk_cur)


@lru_cache(maxsize=None)
def _log_binomials(n: int) -> tuple[float, ...]:
    return tuple(math.log(math.comb(n, k)) for k in range(n + 1))


def omega_tilde_oracle_value(n: int, x: float) -> float:
    """Independent value of (-x)^n K_0^(n)(x) / n! via a K_nu combination.

    Uses K_nu' = -(K_{nu-1} + K_{nu+1})/2 repeatedly, which gives
    (-1)^n K_0^(n)(x) = 2^{-n} sum_k binom(n,k) K_{|n-2k|}(x).  All terms
    are positive, so the sum itself never cancels; it is assembled in log
    space to dodge overflow of the individual K values.
    """
    if n < 0 or n > K_ORDER_CAP:
        raise ValueError(f"n must be in [0, {K_ORDER_CAP}], got {n}")
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    lk = [bessel_k_log(abs(n - 2 * k), x) for k in range(n // 2 + 1)]
    logc = _log_binomials(n)
    # |n - 2k| for k > n/2 mirrors k -> n - k
    log_terms = np.array([logc[k] + lk[k if 2 * k <= n else n - k] for k in range(n + 1)])
    peak = float(np.max(log_terms))
    total = float(np.sum(np.exp(log_terms - peak)))
    log_value = n * math.log(x / 2.0) - math.lgamma(n + 1) + peak + math.log(total)
    return math.exp(log_value)
