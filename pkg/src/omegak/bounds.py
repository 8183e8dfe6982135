"""Closed-form right-hand sides of every certified bound, with validity regions.

Each bound in the catalog carries the id used in reports and on the CLI,
an LHS evaluator (omega-family via quadrature, g-family via the delta
route), the printed RHS formula, and a decidable region predicate.  The
constant gamma, where the bound only asserts existence of one, is a free
constant fitted by the certification engine; shipped defaults are the fitted
values rounded up to one decimal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

from .bessel import OmegaQuery, omega_tilde_deriv
from .expcore import EvalResult, FamilyIndex, gn_deriv_delta, gn_eval
from .quadrature import QuadratureConfig

__all__ = [
    "GridPoint",
    "Region",
    "BoundSpec",
    "rhs_omega_general",
    "rhs_omega_small",
    "rhs_omega_large",
    "rhs_omega_expdecay",
    "rhs_g_general",
    "rhs_g_small",
    "rhs_g_large",
    "rhs_g_expdecay",
    "rhs_g_band",
    "region_membership",
    "catalog",
    "catalog_by_id",
    "catalog_json",
]


@dataclass(frozen=True)
class GridPoint:
    """One certification point: indices, the x-or-t coordinate, and the weight
    exponent ell for bounds stated about t^{m+ell} g_n^(m)."""

    n: int
    m: int
    xt: float
    ell: int = 0


class RegionViolation(ValueError):
    """Point lies outside a bound's validity region."""


@dataclass(frozen=True)
class Region:
    id: str
    description: str
    predicate: Callable[[GridPoint, dict], bool]
    constants: dict = field(default_factory=dict)

    def contains(self, point: GridPoint, constants: dict | None = None) -> bool:
        merged = dict(self.constants)
        if constants:
            merged.update(constants)
        return self.predicate(point, merged)


@dataclass(frozen=True)
class BoundSpec:
    id: str
    kind: str  # "omega" or "g"
    formula: str
    region: Region
    lhs: Callable[[GridPoint, QuadratureConfig | None], EvalResult]
    rhs: Callable[[GridPoint, dict], float]
    gamma_free: bool = False
    ells: tuple[int, ...] = (0,)
    constants: dict = field(default_factory=dict)

    def rhs_at(self, point: GridPoint, **overrides) -> float:
        merged = dict(self.constants)
        merged.update(overrides)
        if not self.region.contains(point, merged):
            raise RegionViolation(f"{point} outside region of bound {self.id}")
        return self.rhs(point, merged)


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------


def _omega_bracket(n: int, m: int, x: float, gamma: float) -> float:
    log_term = math.log((x + 1.0) / x) if (m + n) == 0 else 0.0
    head = 1.0 / math.sqrt(2.0 * x + 1.0) if m == 0 else 0.0
    return head + gamma / math.sqrt(n + 1.0) * (1.0 + log_term)


def rhs_omega_general(n: int, m: int, x: float, gamma: float) -> float:
    """m! (gamma sqrt(n+1) / x)^m ( d_{m,0}/sqrt(2x+1) + gamma/sqrt(n+1) (1 + d_{m+n,0} ln((x+1)/x)) )."""
    return (
        math.factorial(m)
        * (gamma * math.sqrt(n + 1.0) / x) ** m
        * _omega_bracket(n, m, x, gamma)
    )


def rhs_omega_small(n: int, m: int, x: float, gamma: float) -> float:
    """Small-argument variant: same bracket with (gamma / x)^m."""
    return math.factorial(m) * (gamma / x) ** m * _omega_bracket(n, m, x, gamma)


def rhs_omega_large(n: int, m: int, x: float, gamma: float) -> float:
    """Large-argument variant: m! (gamma / x)^m."""
    return math.factorial(m) * (gamma / x) ** m


def rhs_omega_expdecay(n: int, x: float) -> float:
    """3 exp(sqrt(n) - x/(1+sqrt(n))) / sqrt(n+1)."""
    rt = math.sqrt(n)
    return 3.0 * math.exp(rt - x / (1.0 + rt)) / math.sqrt(n + 1.0)


def rhs_g_general(n: int, m: int, ell: int) -> float:
    """C_m (n+1)^{(m-1)/2 + ell} with C_m = (4e)^{m+3} (m+2)!."""
    if ell not in (0, 1):
        raise ValueError(f"ell must be 0 or 1, got {ell}")
    c_m = (4.0 * math.e) ** (m + 3) * math.factorial(m + 2)
    return c_m * (n + 1.0) ** ((m - 1) / 2.0 + ell)


def rhs_g_small(n: int, m: int, t: float) -> float:
    """2^{m+1} (m+2)!/sqrt(n+1) (n/(n-t))^m; the last factor is 1 when n = 0."""
    ratio = 1.0 if (n == 0 or m == 0) else (n / (n - t)) ** m
    return 2.0 ** (m + 1) * math.factorial(m + 2) / math.sqrt(n + 1.0) * ratio


_LARGE_C = 9.0 / 10.0


def rhs_g_large(n: int, m: int, ell: int) -> float:
    """4 (3/ln(1/c))^m (m+2)! (n+1)^ell with c = 9/10 (t enters via the region)."""
    if ell not in (0, 1):
        raise ValueError(f"ell must be 0 or 1, got {ell}")
    return 4.0 * (3.0 / math.log(1.0 / _LARGE_C)) ** m * math.factorial(m + 2) * (n + 1.0) ** ell


def rhs_g_expdecay(n: int, t: float, variant: str = "estgnasymptotic") -> float:
    """Decay bounds for g_n at t >= n + sqrt(n); the two printed variants are
    algebraically identical (sqrt(n)(1 - t/(n+sqrt(n))) = sqrt(n) - t/(1+sqrt(n)))
    and differ only in rounding."""
    rt = math.sqrt(n)
    if variant == "estgnasymptotic":
        expo = rt - t / (1.0 + rt)
    elif variant == "expdecay":
        expo = rt * (1.0 - t / (n + rt)) if n > 0 else 0.0
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return math.exp(expo) / math.sqrt(n + 1.0)


def rhs_g_band(n: int, m: int, t: float, ell: int = 0, variant: str = "defDm") -> float:
    """Auxiliary band bounds:

    * ``defDm``:    |t^m g_n^(m)(t)| <= e^m (m+2)! n^{(m-1)/2}  on 0 <= t <= n - sqrt(n)
    * ``tmgplus``:  |t^{m+ell} g_n^(m)(t)| <= (4e)^{m+3} (m+2)! n^{(m-1)/2+ell}  on t >= n + sqrt(n)
    * ``repgknm2``: g_n(n - delta) <= exp(-delta^2/(2n)) / sqrt(n+1)  for delta in [sqrt(n), n]
    """
    if variant == "defDm":
        return math.e**m * math.factorial(m + 2) * float(n) ** ((m - 1) / 2.0)
    if variant == "tmgplus":
        return (4.0 * math.e) ** (m + 3) * math.factorial(m + 2) * float(n) ** ((m - 1) / 2.0 + ell)
    if variant == "repgknm2":
        delta = n - t
        return math.exp(-delta * delta / (2.0 * n)) / math.sqrt(n + 1.0)
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# region predicates (exact integer arithmetic where floors appear)
# ---------------------------------------------------------------------------


def _cond_extra_m(n: int, m: int) -> bool:
    # 2 floor(m ln(n+1) / (4 ln 2)) - 2 <= (n-1)/2, floors in integer arithmetic
    mu = math.floor(m * math.log(n + 1.0) / (4.0 * math.log(2.0)))
    return 2 * (2 * mu - 2) <= n - 1


def _in_caps(p: GridPoint) -> bool:
    return 0 <= p.n and 0 <= p.m and p.xt > 0


def _region_omega_general(p: GridPoint, c: dict) -> bool:
    return _in_caps(p)


def _region_omega_small(p: GridPoint, c: dict) -> bool:
    C = c["C"]
    gamma = c.get("gamma", 1.0)
    if not _in_caps(p):
        return False
    if p.m > math.sqrt(p.n) * (C - 1.0) / C:
        return False
    if not _cond_extra_m(p.n, p.m):
        return False
    hi = min(p.n / (2.0 * C), (p.n + 1.0) / (4.0 * gamma))
    return 0.0 < p.xt <= hi


def _region_omega_large(p: GridPoint, c: dict) -> bool:
    if not _in_caps(p):
        return False
    if p.m < 1.0 + 2.0 * math.log(p.n + 1.0):
        return False
    threshold = 0.0 if p.n <= 1 else p.n + p.m * (math.sqrt(p.n) + 2.0)
    return p.xt > threshold


def _region_omega_expdecay(p: GridPoint, c: dict) -> bool:
    return _in_caps(p) and p.m == 0 and p.xt >= max(1.0, p.n + math.sqrt(p.n))


def _region_g_general(p: GridPoint, c: dict) -> bool:
    return 0 <= p.n and 0 <= p.m and p.xt >= 0 and p.ell in (0, 1)


def _region_g_small(p: GridPoint, c: dict) -> bool:
    return 0 <= p.n and 0 <= p.m and 0.0 <= p.xt <= p.n - p.m * math.sqrt(p.n)


def _region_g_large(p: GridPoint, c: dict) -> bool:
    if not (0 <= p.n and p.m >= 2.0 * math.log(p.n + 1.0) and p.ell in (0, 1)):
        return False
    threshold = 0.0 if p.n <= 1 else p.n + p.m * (math.sqrt(p.n) + 2.0)
    return p.xt >= threshold


def _region_g_expdecay(p: GridPoint, c: dict) -> bool:
    return 0 <= p.n and p.m == 0 and p.xt >= p.n + math.sqrt(p.n)


def _region_g_expdecay_sharp(p: GridPoint, c: dict) -> bool:
    return 2 <= p.n and p.m == 0 and p.xt >= p.n + math.sqrt(p.n)


def _region_defDm(p: GridPoint, c: dict) -> bool:
    return p.n >= 2 and p.m >= 0 and 0.0 <= p.xt <= p.n - math.sqrt(p.n)


def _region_defDmsa(p: GridPoint, c: dict) -> bool:
    return p.n >= 2 and p.m >= 0 and 0.0 <= p.xt <= p.n - p.m * math.sqrt(p.n)


def _region_repgknm2(p: GridPoint, c: dict) -> bool:
    # delta = n - t in [sqrt(n), n]
    return p.n >= 2 and p.m == 0 and 0.0 <= p.xt <= p.n - math.sqrt(p.n)


def _region_tmgplus(p: GridPoint, c: dict) -> bool:
    return p.n >= 2 and p.m >= 0 and p.ell in (0, 1) and p.xt >= p.n + math.sqrt(p.n)


def region_membership(spec: BoundSpec, point: GridPoint, **constants) -> bool:
    """Exact predicate evaluation for a catalog bound at a point."""
    merged = dict(spec.constants)
    merged.update(constants)
    return spec.region.contains(point, merged)


# ---------------------------------------------------------------------------
# LHS evaluators
# ---------------------------------------------------------------------------


def _lhs_omega(p: GridPoint, cfg: QuadratureConfig | None) -> EvalResult:
    r = omega_tilde_deriv(OmegaQuery(FamilyIndex(p.n, p.m), p.xt), cfg)
    return EvalResult(abs(r.value), r.abs_err, r.cancellation, r.reliable)


def _lhs_g_weighted(p: GridPoint, cfg: QuadratureConfig | None) -> EvalResult:
    # |t^{m+ell} g_n^(m)(t)|; t = 0 only occurs with value 0 on these regions
    if p.xt == 0.0:
        value = 1.0 if (p.n == 0 and p.m == 0 and p.ell == 0) else 0.0
        return EvalResult(value, 0.0)
    r = gn_deriv_delta(FamilyIndex(p.n, p.m), p.xt)
    w = p.xt ** (p.m + p.ell)
    return EvalResult(abs(r.value) * w, r.abs_err * w, r.cancellation, r.reliable)


def _lhs_g_plain(p: GridPoint, cfg: QuadratureConfig | None) -> EvalResult:
    value = gn_eval(p.n, p.xt)
    err = abs(value) * 1e-13
    return EvalResult(value, err)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

# Shipped gamma defaults: fitted on the default certification grid (all four
# fit at 1.0 there), plus one decimal of headroom.
DEFAULT_GAMMA = {
    "estomegatildenm1": 1.1,
    "estomegatildenm1sa_C2": 1.1,
    "estomegatildenm1sa_C4": 1.1,
    "estomegatildenm1la": 1.1,
}


def _make_catalog() -> tuple[BoundSpec, ...]:
    specs = [
        BoundSpec(
            id="estomegatildenm1",
            kind="omega",
            formula="m! (g sqrt(n+1)/x)^m (d_{m,0}/sqrt(2x+1) + g/sqrt(n+1) (1 + d_{m+n,0} ln((x+1)/x)))",
            region=Region("omega_general", "n, m >= 0; x > 0", _region_omega_general),
            lhs=_lhs_omega,
            rhs=lambda p, c: rhs_omega_general(p.n, p.m, p.xt, c["gamma"]),
            gamma_free=True,
            constants={"gamma": DEFAULT_GAMMA["estomegatildenm1"]},
        ),
        BoundSpec(
            id="estomegatildenm1sa_C2",
            kind="omega",
            formula="m! (g/x)^m (d_{m,0}/sqrt(2x+1) + g/sqrt(n+1) (1 + d_{m+n,0} ln((x+1)/x)))",
            region=Region(
                "omega_small_C2",
                "m <= sqrt(n)(C-1)/C; 2 floor(m ln(n+1)/(4 ln 2)) - 2 <= (n-1)/2; "
                "0 < x <= min(n/(2C), (n+1)/(4g)); C = 2",
                _region_omega_small,
            ),
            lhs=_lhs_omega,
            rhs=lambda p, c: rhs_omega_small(p.n, p.m, p.xt, c["gamma"]),
            gamma_free=True,
            constants={"C": 2.0, "gamma": DEFAULT_GAMMA["estomegatildenm1sa_C2"]},
        ),
        BoundSpec(
            id="estomegatildenm1sa_C4",
            kind="omega",
            formula="m! (g/x)^m (d_{m,0}/sqrt(2x+1) + g/sqrt(n+1) (1 + d_{m+n,0} ln((x+1)/x)))",
            region=Region(
                "omega_small_C4",
                "as omega_small_C2 with C = 4",
                _region_omega_small,
            ),
            lhs=_lhs_omega,
            rhs=lambda p, c: rhs_omega_small(p.n, p.m, p.xt, c["gamma"]),
            gamma_free=True,
            constants={"C": 4.0, "gamma": DEFAULT_GAMMA["estomegatildenm1sa_C4"]},
        ),
        BoundSpec(
            id="estomegatildenm1la",
            kind="omega",
            formula="m! (g/x)^m",
            region=Region(
                "omega_large",
                "m >= 1 + 2 ln(n+1); x > 0 for n <= 1 else x > n + m(sqrt(n)+2)",
                _region_omega_large,
            ),
            lhs=_lhs_omega,
            rhs=lambda p, c: rhs_omega_large(p.n, p.m, p.xt, c["gamma"]),
            gamma_free=True,
            constants={"gamma": DEFAULT_GAMMA["estomegatildenm1la"]},
        ),
        BoundSpec(
            id="exponentialdecayomegatilde",
            kind="omega",
            formula="3 exp(sqrt(n) - x/(1+sqrt(n))) / sqrt(n+1)",
            region=Region("omega_expdecay", "m = 0; x >= max(1, n + sqrt(n))", _region_omega_expdecay),
            lhs=_lhs_omega,
            rhs=lambda p, c: rhs_omega_expdecay(p.n, p.xt),
        ),
        BoundSpec(
            id="estgntilde",
            kind="g",
            formula="(4e)^{m+3} (m+2)! (n+1)^{(m-1)/2 + ell}",
            region=Region("g_general", "n, m >= 0; t >= 0; ell in {0,1}", _region_g_general),
            lhs=_lhs_g_weighted,
            rhs=lambda p, c: rhs_g_general(p.n, p.m, p.ell),
            ells=(0, 1),
        ),
        BoundSpec(
            id="estgntildesa",
            kind="g",
            formula="2^{m+1} (m+2)!/sqrt(n+1) (n/(n-t))^m",
            region=Region("g_small", "0 <= t <= n - m sqrt(n)", _region_g_small),
            lhs=_lhs_g_weighted,
            rhs=lambda p, c: rhs_g_small(p.n, p.m, p.xt),
        ),
        BoundSpec(
            id="estgntildela",
            kind="g",
            formula="4 (3/ln(10/9))^m (m+2)! (n+1)^ell",
            region=Region(
                "g_large",
                "m >= 2 ln(n+1); t >= 0 for n <= 1 else t >= n + m(sqrt(n)+2); ell in {0,1}",
                _region_g_large,
            ),
            lhs=_lhs_g_weighted,
            rhs=lambda p, c: rhs_g_large(p.n, p.m, p.ell),
            ells=(0, 1),
        ),
        BoundSpec(
            id="estgnasymptotic",
            kind="g",
            formula="exp(sqrt(n) - t/(1+sqrt(n))) / sqrt(n+1)",
            region=Region("g_expdecay", "m = 0; t >= n + sqrt(n)", _region_g_expdecay),
            lhs=_lhs_g_plain,
            rhs=lambda p, c: rhs_g_expdecay(p.n, p.xt, "estgnasymptotic"),
        ),
        BoundSpec(
            id="expdecay",
            kind="g",
            formula="exp(sqrt(n)(1 - t/(n+sqrt(n)))) / sqrt(n+1)",
            region=Region("g_expdecay_sharp", "n >= 2; m = 0; t >= n + sqrt(n)", _region_g_expdecay_sharp),
            lhs=_lhs_g_plain,
            rhs=lambda p, c: rhs_g_expdecay(p.n, p.xt, "expdecay"),
        ),
        BoundSpec(
            id="defDm",
            kind="g",
            formula="e^m (m+2)! n^{(m-1)/2}",
            region=Region("g_band_left", "n >= 2; 0 <= t <= n - sqrt(n)", _region_defDm),
            lhs=_lhs_g_weighted,
            rhs=lambda p, c: rhs_g_band(p.n, p.m, p.xt, variant="defDm"),
        ),
        BoundSpec(
            id="defDmsa",
            kind="g",
            formula="2^{m+1} (m+2)!/sqrt(n+1) (n/(n-t))^m",
            region=Region("g_band_left_refined", "n >= 2; 0 <= t <= n - m sqrt(n)", _region_defDmsa),
            lhs=_lhs_g_weighted,
            rhs=lambda p, c: rhs_g_small(p.n, p.m, p.xt),
        ),
        BoundSpec(
            id="repgknm2",
            kind="g",
            formula="exp(-(n-t)^2/(2n)) / sqrt(n+1)",
            region=Region("g_gaussian", "n >= 2; m = 0; delta = n - t in [sqrt(n), n]", _region_repgknm2),
            lhs=_lhs_g_plain,
            rhs=lambda p, c: rhs_g_band(p.n, p.m, p.xt, variant="repgknm2"),
        ),
        BoundSpec(
            id="tmgplus",
            kind="g",
            formula="(4e)^{m+3} (m+2)! n^{(m-1)/2 + ell}",
            region=Region("g_band_right", "n >= 2; t >= n + sqrt(n); ell in {0,1}", _region_tmgplus),
            lhs=_lhs_g_weighted,
            rhs=lambda p, c: rhs_g_band(p.n, p.m, p.xt, p.ell, variant="tmgplus"),
            ells=(0, 1),
        ),
    ]
    return tuple(specs)


_CATALOG = _make_catalog()


def catalog() -> tuple[BoundSpec, ...]:
    return _CATALOG


def catalog_by_id(bound_id: str) -> BoundSpec:
    for spec in _CATALOG:
        if spec.id == bound_id:
            return spec
    raise KeyError(f"unknown bound id {bound_id!r}")


def catalog_json() -> str:
    """The bound catalog as JSON: id, formula, region, constants."""
    entries = [
        {
            "id": s.id,
            "kind": s.kind,
            "formula": s.formula,
            "region": s.region.description,
            "gamma_free": s.gamma_free,
            "ells": list(s.ells),
            "constants": s.constants,
        }
        for s in _CATALOG
    ]
    return json.dumps(entries, indent=2, sort_keys=False)
