"""Command-line front end: evaluation, certification, identity checks, and
kernel-table generation.

Exit codes: 0 pass, 1 certification/check failure, 2 usage error, 3 numeric
failure.  All file outputs are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import io
import math
import os
import random
import sys
import tempfile

import numpy as np

from . import __version__
from .bessel import OmegaQuery, omega_tilde_deriv, omega_tilde_oracle
from .bounds import catalog
from .certify import GridSpec, certify, report_csv, report_json
from .cqkernel import build_table, write_binary, write_csv
from .expcore import M_CAP, N_CAP, FamilyIndex
from .identities import (
    double_factorial_check,
    integral_identity_residual,
    taylor_remainder_check,
)
from .quadrature import QuadratureError

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


def _atomic_write(path: str, payload: str | bytes) -> None:
    mode = "wb" if isinstance(payload, bytes) else "w"
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-omegak-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _thread_count() -> int:
    """OMEGAK_THREADS is validated and echoed; evaluation is sequential, the
    knob is reserved for embedding applications."""
    raw = os.environ.get("OMEGAK_THREADS", "1")
    try:
        val = int(raw)
    except ValueError:
        raise UsageError(f"OMEGAK_THREADS must be an integer, got {raw!r}")
    if val < 1:
        raise UsageError(f"OMEGAK_THREADS must be >= 1, got {val}")
    return val


def _build_parser() -> argparse.ArgumentParser:
    bound_ids = ", ".join(s.id for s in catalog())
    ap = argparse.ArgumentParser(
        prog="omegak",
        description="Evaluate and certify the modified-Bessel derivative family.",
    )
    ap.add_argument("--version", action="version", version=f"omegak {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate omegatilde_n^(m)(x)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--method", choices=("quad", "oracle", "all"), default="quad")

    p = sub.add_parser(
        "certify",
        help="certify the bound catalog on a grid",
        description=f"Known bound ids: {bound_ids}",
    )
    p.add_argument("--bounds", type=str, default="", help="comma-separated bound ids")
    p.add_argument("--grid", choices=("default", "dense"), default="default")
    p.add_argument("--fit-gamma", action="store_true",
                   help="fit minimal gamma instead of checking shipped defaults")
    p.add_argument("--out", type=str, required=True, help="output directory")

    p = sub.add_parser("identities", help="verify the appendix results")
    p.add_argument("--max-n", type=int, default=30)
    p.add_argument("--max-m", type=int, default=10)
    p.add_argument("--max-r", type=int, default=3)
    p.add_argument("--max-dfact", type=int, default=400)

    p = sub.add_parser("kernel", help="build a convolution-quadrature kernel table")
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--dmin", type=float, required=True)
    p.add_argument("--dmax", type=float, required=True)
    p.add_argument("--nd", type=int, required=True, help="number of distances")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--format", choices=("csv", "bin"), default="csv")
    p.add_argument("--out", type=str, required=True)
    p.add_argument("--seed", type=int, default=0, help="seed for the cutoff spot-check")

    return ap


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    if not (0 <= args.n <= N_CAP and 0 <= args.m <= M_CAP):
        raise UsageError(f"indices out of caps: n in [0, {N_CAP}], m in [0, {M_CAP}]")
    if not args.x > 0:
        raise UsageError(f"x must be positive, got {args.x}")
    idx = FamilyIndex(args.n, args.m)
    q = OmegaQuery(idx, args.x)
    try:
        rows = []
        if args.method in ("quad", "all"):
            r = omega_tilde_deriv(q)
            rows.append(("quad", r))
        if args.method in ("oracle", "all"):
            if args.m != 0:
                raise UsageError("the K-series oracle covers m = 0 only")
            print(f"oracle: value={omega_tilde_oracle(q):.17g}")
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for name, r in rows:
        print(f"{name}: value={r.value:.17g} abs_err={r.abs_err:.3g} reliable={r.reliable}")
    if args.method == "all":
        delta = abs(rows[0][1].value - omega_tilde_oracle(q))
        print(f"cross-method delta={delta:.3g} (quad err budget {rows[0][1].abs_err:.3g})")
    return EXIT_PASS


def cmd_certify(args) -> int:
    kwargs = {}
    if args.bounds:
        ids = tuple(b.strip() for b in args.bounds.split(",") if b.strip())
        known = {s.id for s in catalog()}
        for b in ids:
            if b not in known:
                raise UsageError(f"unknown bound id {b!r}; known: {', '.join(sorted(known))}")
        kwargs["bounds"] = ids
    if args.grid == "dense":
        kwargs["points_per_interval"] = 80
    grid = GridSpec(**kwargs)
    report = certify(grid, fit=args.fit_gamma)
    os.makedirs(args.out, exist_ok=True)
    _atomic_write(os.path.join(args.out, "cert.json"), report_json(report))
    _atomic_write(os.path.join(args.out, "cert.csv"), report_csv(report))
    for s in report.summaries:
        gamma = "" if s.gamma_fit is None else f" gamma*={s.gamma_fit:g}"
        print(
            f"{s.bound_id}: {s.status} ({s.passed}/{s.checked - s.unreliable} reliable pass,"
            f" {s.unreliable} unreliable, {s.tight} tight){gamma}"
        )
    print(f"report written to {args.out}")
    return EXIT_PASS if report.overall_pass else EXIT_FAIL


def cmd_identities(args) -> int:
    if args.max_n < 1 or args.max_m < 1 or args.max_r < 0 or args.max_dfact < 0:
        raise UsageError("empty verification ranges")
    fails = 0

    worst_taylor = 0.0
    for mu in range(1, 9):
        for t in np.geomspace(1.001, 100.0, 50):
            for z in np.linspace(0.0, 0.999, 50):
                lhs, rhs, ok = taylor_remainder_check(mu, float(t), float(z * t))
                if not ok:
                    fails += 1
                if rhs > 0:
                    worst_taylor = max(worst_taylor, lhs / rhs)
    print(f"taylor remainder: worst lhs/rhs = {worst_taylor:.6f} ({'PASS' if fails == 0 else 'FAIL'})")

    worst_resid, worst_case = 0.0, None
    for n in range(1, args.max_n + 1):
        for m in range(1, args.max_m + 1):
            for r in range(0, args.max_r + 1):
                if not (2 * r <= n - 1 and m >= 1 + 2 * r):
                    continue
                for x in (0.5, 1.0, 2.0, 5.0, 10.0):
                    resid = integral_identity_residual(n, m, r, x)
                    if resid > worst_resid:
                        worst_resid, worst_case = resid, (n, m, r, x)
    ok_int = worst_resid <= 1e-9
    fails += 0 if ok_int else 1
    print(f"integral identity: worst residual = {worst_resid:.3e} at {worst_case} "
          f"({'PASS' if ok_int else 'FAIL'})")

    df_fails = sum(
        0 if double_factorial_check(m, k)[3] else 1
        for m in range(args.max_dfact + 1)
        for k in range(m + 1)
    )
    fails += df_fails
    print(f"double factorial: {df_fails} violations up to m = {args.max_dfact} "
          f"({'PASS' if df_fails == 0 else 'FAIL'})")
    return EXIT_PASS if fails == 0 else EXIT_FAIL


def cmd_kernel(args) -> int:
    if args.nd < 1 or args.dmin <= 0 or args.dmax < args.dmin:
        raise UsageError("need nd >= 1 and 0 < dmin <= dmax")
    if args.dt <= 0 or args.tol <= 0:
        raise UsageError("dt and tol must be positive")
    if not 0 <= args.nmax <= N_CAP:
        raise UsageError(f"nmax out of cap [0, {N_CAP}]")
    distances = [float(d) for d in np.geomspace(args.dmin, args.dmax, args.nd)]
    try:
        table = build_table(args.dt, distances, args.nmax, args.tol)
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.format == "csv":
        buf = io.StringIO()
        write_csv(table, buf)
        _atomic_write(args.out, buf.getvalue())
    else:
        buf = io.BytesIO()
        write_binary(table, buf)
        _atomic_write(args.out, buf.getvalue())
    rng = random.Random(args.seed)
    zeroed = [
        (n, j)
        for n in range(table.n_max + 1)
        for j in range(len(distances))
        if j >= table.cutoff[n]
    ]
    sample = rng.sample(zeroed, max(1, len(zeroed) // 20)) if zeroed else []
    worst = 0.0
    for n, j in sample:
        r = omega_tilde_deriv(OmegaQuery(FamilyIndex(n, 0), distances[j] / args.dt))
        worst = max(worst, abs(r.value) / (2.0 * math.pi))
    print(f"table written to {args.out} (sparsity {table.sparsity:.3f}, seed {args.seed})")
    if sample:
        ok = worst <= args.tol
        print(f"cutoff spot-check on {len(sample)} zeroed entries: worst |omega| = {worst:.3e} "
              f"{'<=' if ok else '>'} tol ({'PASS' if ok else 'FAIL'})")
        if not ok:
            return EXIT_FAIL
    return EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        threads = _thread_count()
        if threads != 1:
            print(f"OMEGAK_THREADS={threads} (sequential evaluation)")
        handler = {
            "eval": cmd_eval,
            "certify": cmd_certify,
            "identities": cmd_identities,
            "kernel": cmd_kernel,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
