"""Verification of the appendix results: the even Taylor kernel and its
remainder bound, the integral identity for weighted derivatives of g_n, and
the double-factorial inequality.

The double-factorial lemma is decided in exact integer arithmetic (both
inequalities squared and cleared of radicals); the returned floats are for
reporting only and may overflow to inf near m = 400 without affecting the
verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp

from .expcore import FamilyIndex, double_factorial, gn_deriv_delta
from .quadrature import QuadratureConfig, adaptive_quadrature

__all__ = [
    "TaylorKernel",
    "taylor_kernel",
    "tmu_eval",
    "tmu_sup_constant",
    "taylor_remainder_check",
    "integral_identity_residual",
    "double_factorial",
    "double_factorial_check",
]


# ---------------------------------------------------------------------------
# Taylor kernel T_mu(z) = sum_{l<mu} binom(2l,l) (z/2)^{2l}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorKernel:
    mu: int
    coeffs: tuple[Fraction, ...]  # coefficient of z^{2l}, l = 0..mu-1

    def eval(self, z: float) -> float:
        if not 0.0 <= z < 1.0:
            raise ValueError(f"z must lie in [0, 1), got {z}")
        z2 = z * z
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * z2 + float(c)
        return acc

    def eval_exact(self, z: Fraction) -> Fraction:
        z2 = z * z
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z2 + c
        return acc


@lru_cache(maxsize=None)
def taylor_kernel(mu: int) -> TaylorKernel:
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    coeffs = tuple(Fraction(math.comb(2 * l, l), 4**l) for l in range(mu))
    return TaylorKernel(mu, coeffs)


def tmu_eval(mu: int, z: float) -> float:
    return taylor_kernel(mu).eval(z)


def tmu_sup_constant(mu: int) -> float:
    """c_mu = 2^{1-2mu} mu binom(2mu,mu); an upper bound for sup T_mu on [0,1]."""
    return float(Fraction(2 * mu * math.comb(2 * mu, mu), 4**mu))


def taylor_remainder_check(mu: int, t: float, x: float) -> tuple[float, float, bool]:
    """Check |1/sqrt(t^2-x^2) - T_mu(x/t)/t| <= (x/t)^{2mu} / sqrt(t^2-x^2).

    Requires 0 <= x < t.  The left side loses ~2 mu log10(t/x) digits to
    cancellation as x/t -> 0, so both sides are formed in mpmath at a working
    precision adapted to that loss, then rounded to doubles.
    """
    if not (0.0 <= x < t):
        raise ValueError(f"need 0 <= x < t, got x={x}, t={t}")
    if x == 0.0:
        return 0.0, 0.0, True
    z = x / t
    lost = 2 * mu * max(0.0, -math.log10(z))
    with mp.workdps(int(40 + lost)):
        zm = mp.mpf(x) / mp.mpf(t)
        inv = 1 / mp.sqrt(1 - zm * zm)
        tk = mp.mpf(0)
        z2 = zm * zm
        for c in reversed(taylor_kernel(mu).coeffs):
            tk = tk * z2 + mp.mpf(c.numerator) / c.denominator
        lhs = abs(inv - tk) / t
        rhs = zm ** (2 * mu) * inv / t
        ok = lhs <= rhs * (1 + mp.mpf("1e-12"))
        return float(lhs), float(rhs), bool(ok)


# ---------------------------------------------------------------------------
# integral identity
# ---------------------------------------------------------------------------


def _leibniz_rhs(n: int, m: int, r: int, x: float) -> float:
    # -( (n-1-2r)! / n! ) d^{2r}/dx^{2r} [ x^m g_{n-1-2r}^{(m-1-2r)}(x) ]
    # expanded by the Leibniz rule; the j-th term differentiates x^m j times.
    np_, mp_ = n - 1 - 2 * r, m - 1 - 2 * r
    total = []
    for j in range(0, min(2 * r, m) + 1):
        coeff = math.comb(2 * r, j) * math.perm(m, j)
        g = gn_deriv_delta(FamilyIndex(np_, mp_ + 2 * r - j), x)
        total.append(coeff * x ** (m - j) * g.value)
    scale = -math.factorial(np_) / math.factorial(n)
    value = scale * math.fsum(total)
    # the g factors carry a few-eps relative error, so for large values the
    # absolute rounding exceeds the 1e-9 target; redo those in mpmath via the
    # exact alternating-binomial form of g^{(m)}
    if abs(value) * 5e-15 > 1e-10:
        return _leibniz_rhs_mp(n, m, r, x)
    return value


def _leibniz_rhs_mp(n: int, m: int, r: int, x: float) -> float:
    np_, mp_ = n - 1 - 2 * r, m - 1 - 2 * r
    with mp.workdps(30):
        xs = mp.mpf(x)
        ex = mp.e**-xs
        total = mp.mpf(0)
        for j in range(0, min(2 * r, m) + 1):
            order = mp_ + 2 * r - j
            g = mp.fsum(
                mp.binomial(order, i) * (-1) ** (order - i) * xs ** (np_ - i) / mp.factorial(np_ - i)
                for i in range(0, min(order, np_) + 1)
            ) * ex
            total += math.comb(2 * r, j) * math.perm(m, j) * xs ** (m - j) * g
        return float(-mp.factorial(np_) / mp.factorial(n) * total)


def _upper_cutoff(n: int, m: int, r: int, x: float, target: float) -> float:
    # integrand magnitude <= 2^m t^{m-1-2r} g_n(t); past the peak the decay
    # bound g_n(t) <= exp(sqrt(n) - t/(1+sqrt(n)))/sqrt(n+1) gives a
    # geometric tail with rate 1/(1+sqrt(n)).
    rt = math.sqrt(n)
    T = max(x + 1.0, n + rt + 1.0)
    rate = 1.0 + rt
    for _ in range(200):
        p = max(m - 1 - 2 * r, 0)
        log_bnd = (
            m * math.log(2.0)
            + p * math.log(T)
            + rt
            - T / rate
            - 0.5 * math.log(n + 1.0)
            + math.log(2.0 * rate)
        )
        if log_bnd <= math.log(target):
            return T
        T *= 1.2
    raise ArithmeticError("could not certify a truncation point")


def integral_identity_residual(
    n: int, m: int, r: int, x: float, cfg: QuadratureConfig | None = None
) -> float:
    """|LHS - RHS| for the identity

        int_x^inf t^{m-1-2r} g_n^{(m)}(t) dt
            = -((n-1-2r)!/n!) (d/dx)^{2r} [x^m g_{n-1-2r}^{(m-1-2r)}(x)].

    Restricted to m >= 1 + 2r so every derivative order on the right is
    nonnegative; the LHS uses the substitution t = x + v^2 and adaptive
    quadrature, the RHS the exact Leibniz expansion.

    The integrand reaches magnitudes ~n^{m/2} m!! with near-total interior
    cancellation, so for the largest (n, m) the double-precision noise floor
    eps * int|f| exceeds the certification target; those cases escalate to a
    tanh-sinh quadrature in mpmath with exact Horner coefficients.
    """
    if not (0 <= 2 * r <= n - 1):
        raise ValueError(f"need 0 <= 2r <= n-1, got n={n}, r={r}")
    if m < 1 + 2 * r:
        raise ValueError(f"need m >= 1+2r for nonnegative derivative orders, got m={m}, r={r}")
    if x <= 0.0:
        raise ValueError(f"need x > 0, got {x}")
    if cfg is None:
        cfg = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-12)

    from .expcore import _tm_gn_deriv_arr  # vectorized t^m g_n^(m)

    power = -1 - 2 * r

    def integrand(v):
        t = x + v * v
        tm_g, err = _tm_gn_deriv_arr(n, m, t)
        w = 2.0 * v * t**power
        return w * tm_g, abs(w) * err

    T = _upper_cutoff(n, m, r, x, target=cfg.abs_tol / 10.0)
    v_max = math.sqrt(T - x)
    # seed panel edges at the peak of g_n and the band edges around it
    brk = sorted(
        math.sqrt(tt - x)
        for tt in (n - math.sqrt(n), float(n), n + math.sqrt(n))
        if x < tt < T
    )
    from .quadrature import QuadratureError

    try:
        res = adaptive_quadrature(integrand, 0.0, v_max, cfg, breakpoints=tuple(brk))
    except QuadratureError as exc:
        res = exc.best
    lhs = res.value
    # achieved absolute error includes ~eps * int|f| of rounding noise from
    # the strong interior cancellation; escalate when it eats into the 1e-9
    # certification target
    if res.quad_err + 2.3e-16 * res.abs_integral > 1e-10:
        lhs = _mp_lhs(n, m, r, x)
    return abs(lhs - _leibniz_rhs(n, m, r, x))


def _mp_lhs(n: int, m: int, r: int, x: float) -> float:
    from .expcore import snm_polynomial

    p = m - 1 - 2 * r
    coeffs = [c.numerator for c in reversed(snm_polynomial(n, m).coefficients)]
    rt = math.sqrt(n)
    pts = sorted({x, float(n), n + 12.0 * (1.0 + rt)})
    pts = [t for t in pts if t >= x] + [mp.inf]
    with mp.workdps(20):
        lgn = mp.loggamma(n + 1)

        def f(t):
            acc = mp.mpf(0)
            for c in coeffs:
                acc = acc * t + c
            return mp.e ** (n * mp.log(t) - t - lgn) * acc * t ** (p - m)

        return float(mp.quad(f, pts, maxdegree=5))


# ---------------------------------------------------------------------------
# double factorial lemma
# ---------------------------------------------------------------------------


def double_factorial_check(m: int, k: int) -> tuple[float, float, float, bool]:
    """Check (3/5)^k sqrt(m!/(m-k)!) <= m!!/(m-k)!! <= 2^k sqrt(m!/(m-k)!).

    Both inequalities are decided exactly after squaring:

        9^k (m!/(m-k)!) ((m-k)!!)^2 <= 25^k (m!!)^2
        (m!!)^2 <= 4^k (m!/(m-k)!) ((m-k)!!)^2

    The returned (lower, mid, upper) triple is computed in log-space from the
    same integers and is for reporting only.
    """
    if not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got m={m}, k={k}")
    fall = math.factorial(m) // math.factorial(m - k)  # falling factorial, exact
    dm, dmk = double_factorial(m), double_factorial(m - k)
    ok_lower = 9**k * fall * dmk * dmk <= 25**k * dm * dm
    ok_upper = dm * dm <= 4**k * fall * dmk * dmk

    def _exp(v: float) -> float:
        try:
            return math.exp(v)
        except OverflowError:
            return math.inf

    log_root = 0.5 * (math.lgamma(m + 1) - math.lgamma(m - k + 1))
    lower = _exp(k * math.log(3.0 / 5.0) + log_root)
    mid = _exp(math.log(dm) - math.log(dmk))
    upper = _exp(k * math.log(2.0) + log_root)
    return lower, mid, upper, bool(ok_lower and ok_upper)
