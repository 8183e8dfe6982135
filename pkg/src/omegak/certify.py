"""Grid certification engine for the bound catalog.

Sweeps every bound over log-spaced grids restricted to its validity region,
fits the minimal admissible gamma for the bounds that only assert existence
of one, and emits deterministic CSV/JSON reports.

Pass criterion: lhs + lhs_err <= rhs * (1 + 1e-12).  The relative slack
keeps exact-equality cases (g_0(t) = e^{-t} equals its own decay bound bit
for bit) from failing on the conservative error term; any genuine violation
is orders of magnitude larger.  Near-equality records (margin < 10 * lhs_err)
are labeled tight for human review.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds import BoundSpec, GridPoint, catalog, catalog_by_id
from .quadrature import QuadratureConfig, QuadratureError

__all__ = [
    "GridSpec",
    "BoundCheckRecord",
    "BoundSummary",
    "CertReport",
    "DEFAULT_GRID",
    "grid_points",
    "sweep",
    "fit_gamma",
    "certify",
    "report_json",
    "report_csv",
]

RHS_ULP_SLACK = 1e-12
GAMMA_MAX = 1024.0

# quadrature budget for sweep LHS values: relative-driven so that deep-decay
# points (omega ~ e^{-x}) are still resolved to 1e-10 of themselves
SWEEP_CFG = QuadratureConfig(abs_tol=1e-300, rel_tol=1e-10)


@dataclass(frozen=True)
class GridSpec:
    n_values: tuple[int, ...] = (0, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89)
    m_values: tuple[int, ...] = tuple(range(9))
    points_per_interval: int = 40
    bounds: tuple[str, ...] = ()  # empty = whole catalog

    def __post_init__(self):
        if any(n < 0 for n in self.n_values) or any(m < 0 for m in self.m_values):
            raise ValueError("grid indices must be nonnegative")
        if self.points_per_interval < 1:
            raise ValueError("points_per_interval must be >= 1")

    def selected(self) -> tuple[BoundSpec, ...]:
        if not self.bounds:
            return catalog()
        return tuple(catalog_by_id(b) for b in self.bounds)

    def digest(self) -> str:
        blob = json.dumps(
            {
                "n": list(self.n_values),
                "m": list(self.m_values),
                "points": self.points_per_interval,
                "bounds": list(self.bounds),
            },
            sort_keys=True,
        ).encode()
        return hashlib.sha256(blob).hexdigest()


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class BoundCheckRecord:
    bound_id: str
    point: GridPoint
    lhs: float
    lhs_err: float
    rhs: float
    reliable: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.lhs + self.lhs_err <= self.rhs * (1.0 + RHS_ULP_SLACK)

    @property
    def tight(self) -> bool:
        return self.margin < 10.0 * self.lhs_err


@dataclass
class BoundSummary:
    bound_id: str
    status: str  # PASS / FAIL / INCONCLUSIVE
    checked: int
    passed: int
    failed: int
    unreliable: int
    tight: int
    gamma_fit: float | None
    worst_margin: float | None
    worst_point: GridPoint | None


@dataclass
class CertReport:
    grid: GridSpec
    records: dict[str, list[BoundCheckRecord]]
    summaries: list[BoundSummary] = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return bool(self.summaries) and all(s.status == "PASS" for s in self.summaries)


# ---------------------------------------------------------------------------
# grid construction
# ---------------------------------------------------------------------------


def _interval(spec: BoundSpec, n: int, m: int) -> tuple[float, float] | None:
    """Coordinate interval to sample for (bound, n, m).

    Regions unbounded above are truncated a few decay lengths past the
    crossover scale; the exact-region predicate still filters every point.
    """
    rt = math.sqrt(n)
    bid = spec.id
    if bid == "estomegatildenm1":
        return 1e-2, 30.0 * (n + m + 1)
    if bid.startswith("estomegatildenm1sa"):
        C = spec.constants["C"]
        hi = min(n / (2.0 * C), (n + 1.0) / 4.0)  # widest over gamma >= 1
        if hi <= 0:
            return None
        return hi * 1e-3, hi
    if bid == "estomegatildenm1la":
        lo = 1e-2 if n <= 1 else (n + m * (rt + 2.0)) * (1.0 + 1e-9)
        return lo, 10.0 * lo + 40.0
    if bid in ("exponentialdecayomegatilde",):
        lo = max(1.0, n + rt)
        return lo, 3.0 * lo + 40.0
    if bid == "estgntilde":
        return 1e-2, 3.0 * n + 40.0
    if bid in ("estgntildesa", "defDmsa"):
        hi = n - m * rt
        if hi <= 0:
            return None
        return hi * 1e-3, hi
    if bid == "estgntildela":
        lo = 1e-2 if n <= 1 else n + m * (rt + 2.0)
        return lo, 10.0 * lo + 40.0
    if bid in ("estgnasymptotic", "expdecay", "tmgplus"):
        lo = max(n + rt, 1e-2)
        return lo, 3.0 * lo + 40.0
    if bid in ("defDm", "repgknm2"):
        hi = n - rt
        if hi <= 0:
            return None
        return hi * 1e-3, hi
    raise KeyError(f"no interval rule for bound {bid!r}")


def grid_points(spec: BoundSpec, grid: GridSpec) -> list[GridPoint]:
    """Region-admissible points for one bound, in deterministic sorted order."""
    pts: list[GridPoint] = []
    for n in grid.n_values:
        for m in grid.m_values:
            iv = _interval(spec, n, m)
            if iv is None:
                continue
            lo, hi = iv
            if not (0.0 < lo <= hi):
                continue
            xs = np.geomspace(lo, hi, grid.points_per_interval)
            for x in xs:
                for ell in spec.ells:
                    p = GridPoint(n, m, float(x), ell)
                    if spec.region.contains(p, spec.constants):
                        pts.append(p)
    pts.sort(key=lambda p: (p.n, p.m, p.ell, p.xt))
    return pts


# ---------------------------------------------------------------------------
# sweep and fit
# ---------------------------------------------------------------------------


def _evaluate(spec: BoundSpec, pts: list[GridPoint]) -> list[BoundCheckRecord]:
    records = []
    for p in pts:
        try:
            lhs = spec.lhs(p, SWEEP_CFG)
        except QuadratureError as exc:
            best = exc.best
            records.append(
                BoundCheckRecord(spec.id, p, best.value, math.inf, spec.rhs(p, spec.constants), False)
            )
            continue
        rhs = spec.rhs(p, dict(spec.constants))
        records.append(BoundCheckRecord(spec.id, p, lhs.value, lhs.abs_err, rhs, lhs.reliable))
    return records


def sweep(spec: BoundSpec, grid: GridSpec = DEFAULT_GRID) -> list[BoundCheckRecord]:
    return _evaluate(spec, grid_points(spec, grid))


def _passes_at_gamma(spec: BoundSpec, records: list[BoundCheckRecord], gamma: float) -> bool:
    consts = dict(spec.constants)
    consts["gamma"] = gamma
    for rec in records:
        if not rec.reliable:
            continue
        if not spec.region.contains(rec.point, consts):  # gamma can shrink the region
            continue
        rhs = spec.rhs(rec.point, consts)
        if not rec.lhs + rec.lhs_err <= rhs * (1.0 + RHS_ULP_SLACK):
            return False
    return True


def fit_gamma(
    spec: BoundSpec, grid: GridSpec = DEFAULT_GRID, records: list[BoundCheckRecord] | None = None
) -> float:
    """Bisect the smallest gamma in [1, 1024] (3 decimals) passing everywhere.

    LHS values are evaluated once; only the RHS (and, for the small-argument
    bound, the gamma-dependent region) is recomputed per trial.  Raises
    ValueError when no gamma <= 1024 is admissible.
    """
    if not spec.gamma_free:
        raise ValueError(f"bound {spec.id} has no free constant")
    if records is None:
        records = sweep(spec, grid)
    if not _passes_at_gamma(spec, records, GAMMA_MAX):
        worst = max(
            (r for r in records if r.reliable),
            key=lambda r: r.lhs - r.rhs,
            default=None,
        )
        raise ValueError(f"no admissible gamma <= {GAMMA_MAX} for {spec.id}; worst offender {worst}")
    lo, hi = 1.0, GAMMA_MAX
    if _passes_at_gamma(spec, records, lo):
        return lo
    while hi - lo > 5e-4:
        mid = 0.5 * (lo + hi)
        if _passes_at_gamma(spec, records, mid):
            hi = mid
        else:
            lo = mid
    return round(hi, 3)


def _summarize(
    spec: BoundSpec, records: list[BoundCheckRecord], gamma_fit: float | None
) -> BoundSummary:
    reliable = [r for r in records if r.reliable]
    unreliable = len(records) - len(reliable)
    passed = sum(1 for r in reliable if r.ok)
    failed = len(reliable) - passed
    tight = sum(1 for r in reliable if r.ok and r.tight)
    if not reliable:
        status = "INCONCLUSIVE"
    elif failed:
        status = "FAIL"
    else:
        status = "PASS"
    worst = min(reliable, key=lambda r: r.margin, default=None)
    return BoundSummary(
        bound_id=spec.id,
        status=status,
        checked=len(records),
        passed=passed,
        failed=failed,
        unreliable=unreliable,
        tight=tight,
        gamma_fit=gamma_fit,
        worst_margin=worst.margin if worst else None,
        worst_point=worst.point if worst else None,
    )


def certify(grid: GridSpec = DEFAULT_GRID, fit: bool = True) -> CertReport:
    """Run the full sweep (and gamma fits) over the selected bounds."""
    report = CertReport(grid=grid, records={})
    for spec in grid.selected():
        records = sweep(spec, grid)
        gamma_fit = None
        if fit and spec.gamma_free:
            try:
                gamma_fit = fit_gamma(spec, grid, records)
            except ValueError:
                gamma_fit = math.inf
            if math.isfinite(gamma_fit):
                # re-score the shipped records at the fitted constant
                consts = dict(spec.constants)
                consts["gamma"] = gamma_fit
                records = [
                    BoundCheckRecord(r.bound_id, r.point, r.lhs, r.lhs_err,
                                     spec.rhs(r.point, consts), r.reliable)
                    for r in records
                    if spec.region.contains(r.point, consts)
                ]
        report.records[spec.id] = records
        summary = _summarize(spec, records, gamma_fit)
        if gamma_fit is not None and not math.isfinite(gamma_fit):
            summary.status = "FAIL"
        report.summaries.append(summary)
    return report


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def report_csv(report: CertReport) -> str:
    """Deterministic CSV: stable column order, %.17g value formatting."""
    buf = io.StringIO()
    buf.write("bound_id,n,m,ell,xt,lhs,lhs_err,rhs,margin,pass,reliable,tight\n")
    for bound_id in sorted(report.records):
        for r in report.records[bound_id]:
            p = r.point
            buf.write(
                "%s,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d\n"
                % (
                    bound_id, p.n, p.m, p.ell, p.xt,
                    r.lhs, r.lhs_err, r.rhs, r.margin,
                    int(r.ok), int(r.reliable), int(r.tight),
                )
            )
    return buf.getvalue()


def report_json(report: CertReport) -> str:
    payload = {
        "schema": "cert-v1",
        "tool_version": __version__,
        "grid_hash": report.grid.digest(),
        "grid": {
            "n_values": list(report.grid.n_values),
            "m_values": list(report.grid.m_values),
            "points_per_interval": report.grid.points_per_interval,
            "bounds": list(report.grid.bounds) or [s.id for s in catalog()],
        },
        "overall_pass": report.overall_pass,
        "bounds": [
            {
                "id": s.bound_id,
                "status": s.status,
                "checked": s.checked,
                "passed": s.passed,
                "failed": s.failed,
                "unreliable": s.unreliable,
                "tight": s.tight,
                "gamma_fit": s.gamma_fit,
                "worst_margin": s.worst_margin,
                "worst_point": None
                if s.worst_point is None
                else {
                    "n": s.worst_point.n,
                    "m": s.worst_point.m,
                    "ell": s.worst_point.ell,
                    "xt": s.worst_point.xt,
                },
            }
            for s in report.summaries
        ],
    }
    return json.dumps(payload, indent=2)
