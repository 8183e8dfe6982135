"""Stable evaluation of g_n(t) = t^n e^{-t} / n! and its derivatives.

Three mutually checking evaluation routes are provided for g_n^(m):

* ``gn_deriv_closed``    -- factorization  t^m g_n^(m)(t) = g_n(t) s_{n,m}(t)
  with the polynomial s_{n,m} summed by compensated summation,
* ``gn_deriv_delta``     -- the same factorization but with s_{n,m} evaluated
  through its recentering at t = n (the delta expansion), which is better
  conditioned near the peak of g_n,
* ``gn_deriv_recursive`` -- the plain recursion g_n' = g_{n-1} - g_n unrolled
  down to derivative order zero (oracle for moderate n + m).

The coefficient layers (s_{n,m}, the delta expansion tables, double
factorials) are exact big-integer / big-rational; floating point enters only
in the final combination with g_n(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "N_CAP",
    "M_CAP",
    "CANCELLATION_CAP",
    "FamilyIndex",
    "EvalResult",
    "SnmPolynomial",
    "DeltaExpansion",
    "gn_log",
    "gn_eval",
    "gn_deriv_closed",
    "gn_deriv_delta",
    "gn_deriv_recursive",
    "snm_polynomial",
    "snm_eval_exact",
    "delta_expansion_build",
    "majorant_A",
    "majorant_G",
    "double_factorial",
]

# Practical caps enforced at the API boundary.
N_CAP = 2000
M_CAP = 60

# A result whose sum-of-|terms| / |result| ratio exceeds this is flagged
# unreliable (but still returned).
CANCELLATION_CAP = 1e8

_EPS = np.finfo(float).eps

# Cap for the recursion oracle (combined n + m).
RECURSIVE_CAP = 300


@dataclass(frozen=True)
class FamilyIndex:
    """Index pair (order n, derivative order m) of the exponential family."""

    n: int
    m: int = 0

    def __post_init__(self) -> None:
        if not (isinstance(self.n, int) and isinstance(self.m, int)):
            raise TypeError("family indices must be integers")
        if self.n < 0 or self.m < 0:
            raise ValueError(f"indices must be nonnegative, got (n={self.n}, m={self.m})")
        if self.n > N_CAP or self.m > M_CAP:
            raise ValueError(
                f"(n={self.n}, m={self.m}) exceeds caps (n <= {N_CAP}, m <= {M_CAP})"
            )


@dataclass(frozen=True)
class EvalResult:
    """Numeric value with an absolute-error estimate and a cancellation flag.

    ``cancellation`` is the ratio of the sum of absolute terms to the
    absolute result (1.0 when no cancellation occurred).  ``reliable`` is
    False when that ratio exceeds ``CANCELLATION_CAP``.
    """

    value: float
    abs_err: float
    cancellation: float = 1.0
    reliable: bool = True

    def __post_init__(self) -> None:
        if self.abs_err < 0:
            raise ValueError("abs_err must be nonnegative")

    @staticmethod
    def from_sum(value: float, abs_err: float, abs_sum: float) -> "EvalResult":
        if value == 0.0:
            cancellation = 1.0 if abs_sum == 0.0 else math.inf
        else:
            cancellation = max(1.0, abs_sum / abs(value))
        return EvalResult(value, abs_err, cancellation, cancellation <= CANCELLATION_CAP)


def gn_log(n: int, t: float) -> float:
    """ln g_n(t) = n ln t - t - ln n!  for t > 0."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t == 0:
        raise ValueError("gn_log requires t > 0 (use gn_eval for t = 0)")
    if n < 0:
        raise ValueError("n must be nonnegative")
    return n * math.log(t) - t - math.lgamma(n + 1)


def gn_eval(n: int, t: float) -> float:
    """g_n(t) = t^n e^{-t} / n!, with g_n(0) = [n == 0]."""
    if t == 0:
        return 1.0 if n == 0 else 0.0
    return math.exp(gn_log(n, t))


def _gn_log_arr(n: int, t: np.ndarray) -> np.ndarray:
    return n * np.log(t) - t - math.lgamma(n + 1)


def _gn_rel_err(n: int, t: float) -> float:
    # Roundoff of the log-space path: the absolute error of gn_log is of the
    # order eps * (|n ln t| + t + ln n!), which exp() turns into relative error.
    return _EPS * (abs(n * math.log(t)) + t + abs(math.lgamma(n + 1)) + 4.0)


# ---------------------------------------------------------------------------
# exact coefficient layer: s_{n,m}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SnmPolynomial:
    """Exact coefficients of s_{n,m}(t) with t^m g_n^(m)(t) = g_n(t) s_{n,m}(t).

    ``coefficients[p]`` is the (rational, in fact integer) coefficient of t^p;
    the coefficient of t^{m-l} is binom(m,l) (-1)^{m-l} n!/(n-l)! for
    0 <= l <= min(m, n).
    """

    n: int
    m: int
    coefficients: tuple[Fraction, ...]

    def eval_exact(self, t: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc


@lru_cache(maxsize=None)
def snm_polynomial(n: int, m: int) -> SnmPolynomial:
    FamilyIndex(n, m)
    coeffs = [Fraction(0)] * (m + 1)
    for ell in range(min(m, n) + 1):
        ff = math.perm(n, ell)  # n!/(n-ell)!
        coeffs[m - ell] = Fraction(math.comb(m, ell) * (-1) ** (m - ell) * ff)
    return SnmPolynomial(n, m, tuple(coeffs))


def snm_eval_exact(n: int, m: int, t: Fraction) -> Fraction:
    return snm_polynomial(n, m).eval_exact(Fraction(t))


@lru_cache(maxsize=None)
def _snm_term_factors(n: int, m: int) -> tuple[float, ...]:
    # term_ell of s_{n,m}(t)/t^m = binom(m,ell) (-1)^{m-ell} n!/(n-ell)! t^{-ell}
    return tuple(
        float(math.comb(m, ell) * (-1) ** (m - ell) * math.perm(n, ell))
        for ell in range(min(m, n) + 1)
    )


def _snm_over_tm(n: int, m: int, t: float) -> tuple[float, float]:
    """(s_{n,m}(t) / t^m, sum of |terms|) with compensated summation."""
    factors = _snm_term_factors(n, m)
    terms = [c * t ** (-ell) for ell, c in enumerate(factors)]
    return math.fsum(terms), math.fsum(abs(v) for v in terms)


def gn_deriv_closed(idx: FamilyIndex, t: float) -> EvalResult:
    """g_n^(m)(t) via the closed-form factorization g_n(t) s_{n,m}(t) / t^m."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    n, m = idx.n, idx.m
    g = gn_eval(n, t)
    s, abs_sum = _snm_over_tm(n, m, t)
    value = g * s
    abs_err = g * abs_sum * _EPS * (m + 4) + abs(value) * _gn_rel_err(n, t)
    return EvalResult.from_sum(value, abs_err, g * abs_sum)


def gn_deriv_recursive(idx: FamilyIndex, t: float) -> float:
    """g_n^(m)(t) by unrolling g_k^(m) = g_{k-1}^(m-1) - g_k^(m-1) to order 0.

    Intended as an oracle for moderate n + m; raises when the combined cap
    is exceeded.  Each base value g_k(t) is evaluated independently in
    log space, so the rounding path differs from the closed form.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    n, m = idx.n, idx.m
    if n + m > RECURSIVE_CAP:
        raise ValueError(f"recursive oracle capped at n + m <= {RECURSIVE_CAP}")
    lo = n - m  # g_k for k < 0 vanish identically
    row = {k: gn_eval(k, t) for k in range(max(lo, 0), n + 1)}
    for _ in range(m):
        row = {k: row.get(k - 1, 0.0) - row[k] for k in row if k > lo}
        lo += 1
    return row[n]


# ---------------------------------------------------------------------------
# delta expansion of s_{n,m} around t = n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaExpansion:
    """Exact coefficient table of the recentered polynomials p_{l,m}.

    ``p[l][k]`` is the rational coefficient of delta^k in p_{l,m}, for
    0 <= l <= floor(m/2) and 0 <= k <= m - 2l.  The recentered polynomial
    stilde_{n,m}(delta) = sum_l n^l p_{l,m}(delta) reproduces
    (-1)^m s_{n,m}(n - delta) exactly.
    """

    m: int
    p: tuple[tuple[Fraction, ...], ...]
    c: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def stilde_exact(self, n: int, delta: Fraction) -> Fraction:
        delta = Fraction(delta)
        total = Fraction(0)
        for ell, poly in enumerate(self.p):
            acc = Fraction(0)
            for coeff in reversed(poly):
                acc = acc * delta + coeff
            total += Fraction(n) ** ell * acc
        return total

    def coefficient_c(self, ell: int, k: int) -> Fraction:
        return self.c[ell][k]


@lru_cache(maxsize=None)
def _p_tables(m: int) -> tuple[tuple[Fraction, ...], ...]:
    # recursion p_{l,m+1} = (m - d) p_{l,m} - d p'_{l,m} + p'_{l-1,m},
    # carried as dense coefficient lists in d; p_{0,0} = 1.
    if m == 0:
        return ((Fraction(1),),)
    prev = _p_tables(m - 1)
    mm = m - 1
    out: list[tuple[Fraction, ...]] = []
    for ell in range(m // 2 + 1):
        coeffs = [Fraction(0)] * (m - 2 * ell + 1)
        if ell < len(prev):
            pl = prev[ell]
            for k, a in enumerate(pl):
                coeffs[k] += mm * a          # m * p
                if k + 1 <= m - 2 * ell:
                    coeffs[k + 1] -= a       # -d * p
                if k >= 1:
                    coeffs[k] -= k * a       # -d * p'  (degree preserved)
        if 0 <= ell - 1 < len(prev):
            pl1 = prev[ell - 1]
            for k in range(1, len(pl1)):
                if k - 1 <= m - 2 * ell:
                    coeffs[k - 1] += k * pl1[k]   # p'_{l-1}
        out.append(tuple(coeffs))
    return tuple(out)


@lru_cache(maxsize=None)
def _c_tables(ell_max: int, k_max: int) -> tuple[tuple[Fraction, ...], ...]:
    # c_{l,k+1} = k/(k+1) c_{l,k} + c_{l-1,k-1}/(k+1); c_{l,2l} = 1/(2^l l!);
    # c_{0,k} = [k == 0]; c_{l,k} = 0 for k < 2l.
    c = [[Fraction(0)] * (k_max + 1) for _ in range(ell_max + 1)]
    c[0][0] = Fraction(1)
    for ell in range(1, ell_max + 1):
        if 2 * ell <= k_max:
            c[ell][2 * ell] = Fraction(1, 2**ell * math.factorial(ell))
        for k in range(2 * ell, k_max):
            c[ell][k + 1] = Fraction(k, k + 1) * c[ell][k] + c[ell - 1][k - 1] / (k + 1)
    return tuple(tuple(row) for row in c)


@lru_cache(maxsize=None)
def delta_expansion_build(m: int) -> DeltaExpansion:
    """Exact delta-expansion tables for derivative order m."""
    if not (0 <= m <= M_CAP):
        raise ValueError(f"m must be in [0, {M_CAP}], got {m}")
    return DeltaExpansion(m, _p_tables(m), _c_tables(m // 2, m))


@lru_cache(maxsize=None)
def _p_tables_float(m: int) -> tuple[np.ndarray, ...]:
    return tuple(np.array([float(a) for a in poly]) for poly in _p_tables(m))


def _stilde_float(n: int, m: int, delta: float) -> tuple[float, float]:
    """(stilde_{n,m}(delta), sum of |terms|) with compensated summation."""
    terms: list[float] = []
    npow = 1.0
    for poly in _p_tables_float(m):
        dpow = 1.0
        for a in poly:
            if a != 0.0:
                terms.append(npow * a * dpow)
            dpow *= delta
        npow *= n
    return math.fsum(terms), math.fsum(abs(v) for v in terms)


def _stilde_float_arr(n: int, m: int, delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized stilde evaluation; returns (values, sums of |terms|)."""
    total = np.zeros_like(delta)
    abs_total = np.zeros_like(delta)
    npow = 1.0
    for poly in _p_tables_float(m):
        dpow = np.ones_like(delta)
        acc = np.zeros_like(delta)
        abs_acc = np.zeros_like(delta)
        for a in poly:
            if a != 0.0:
                acc += a * dpow
                abs_acc += abs(a) * np.abs(dpow)
            dpow = dpow * delta
        total += npow * acc
        abs_total += npow * abs_acc
        npow *= n
    return total, abs_total


def gn_deriv_delta(idx: FamilyIndex, t: float) -> EvalResult:
    """g_n^(m)(t) with s_{n,m} evaluated through the delta expansion.

    Better conditioned near t = n where the plain monomial form of s_{n,m}
    cancels heavily.
    """
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")
    n, m = idx.n, idx.m
    stilde, abs_sum = _stilde_float(n, m, n - t)
    s = (-1) ** m * stilde
    # g_n(t) / t^m in one exp() to avoid intermediate under/overflow
    g_over_tm = math.exp(gn_log(n, t) - m * math.log(t))
    value = g_over_tm * s
    abs_err = g_over_tm * abs_sum * _EPS * (m + 4) + abs(value) * _gn_rel_err(n, t)
    return EvalResult.from_sum(value, abs_err, g_over_tm * abs_sum)


def _tm_gn_deriv_arr(n: int, m: int, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (t^m g_n^(m)(t), absolute-error estimate) via the delta path."""
    stilde, abs_sum = _stilde_float_arr(n, m, n - t)
    g = np.exp(_gn_log_arr(n, t))
    value = g * ((-1) ** m * stilde)
    rel_g = _EPS * (np.abs(n * np.log(t)) + t + abs(math.lgamma(n + 1)) + 4.0)
    err = g * abs_sum * _EPS * (m + 4) + np.abs(value) * rel_g
    return value, err


# ---------------------------------------------------------------------------
# majorants on the central band
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def majorant_A(idx: FamilyIndex, first_match: bool = True) -> float:
    """Recursive majorant A_n^(m) of |g_n^(m)| on [n - sqrt(n), n + sqrt(n)].

    The defining table overlaps at (n=1, m=0): the n=1 row gives 0, the m=0
    row gives 1/sqrt(2).  ``first_match=True`` (default) applies the rows in
    listed order; ``first_match=False`` lets the m=0 row win at (1, 0).
    """
    n, m = idx.n, idx.m
    if n == 1 and m == 0 and not first_match:
        return 1.0 / math.sqrt(2.0)
    if n == 0:
        return 1.0
    if n == 1:
        return float(m)
    if m == 0:
        return 1.0 / math.sqrt(n + 1)
    if m == 1:
        return math.sqrt(2.0) / (n + 1)
    a1 = majorant_A(FamilyIndex(n - 1, m - 1), first_match)
    a2 = majorant_A(FamilyIndex(n - 1, m - 2), first_match)
    return a1 / math.sqrt(n) + (m - 1) / n * a2


def double_factorial(k: int) -> int:
    """k!! with the conventions 0!! = (-1)!! = 1."""
    if k < -1:
        raise ValueError(f"double factorial undefined for {k}")
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


def majorant_G(idx: FamilyIndex) -> float:
    """Closed-form majorant G_n^(m) = 2^n (m-1)!! / (n! (m-1-2n)!!) for n < m/2."""
    n, m = idx.n, idx.m
    if not 2 * n < m:
        raise ValueError(f"majorant_G requires n < m/2, got (n={n}, m={m})")
    value = Fraction(2**n * double_factorial(m - 1),
                     math.factorial(n) * double_factorial(m - 1 - 2 * n))
    return float(value)
