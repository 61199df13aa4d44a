"""Command-line front end.

    friable specfn --kappa 1 2 --u-min 0 --u-max 10 --u-step 0.5
    friable friable --spec f.json --u-min 1 --u-max 3 --u-step 0.5 --y-list 100 1000
    friable verify --seed 0 --out results/
    friable sieve --instance inst.json --brute
    friable bench

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .arith.bounds import rankin_bound
from .arith.multiplicative import MultiplicativeSpec
from .arith.sums import DEFAULT_BUDGET, friable_report
from .errors import BudgetExceededError, FriableError, InvalidInputError, TableRangeError
from .sieve.io import load_instances, reports_to_csv, run_instance
from .specfn import (default_table, j_kappa, lambda_kappa, mu_kappa, rho_asymptotic,
                     xi_kappa)
from .verify import SUITES, run_suite

log = logging.getLogger("friable")

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def fmt(v: Optional[float]) -> str:
    if v is None:
        return ""
    return f"{v:.12e}"


def _grid(u_min: float, u_max: float, u_step: float) -> List[float]:
    if u_step <= 0 or u_max < u_min:
        raise InvalidInputError("empty u grid")
    n = int(math.floor((u_max - u_min) / u_step + 1e-9))
    return [u_min + i * u_step for i in range(n + 1)]


def _csv_text(header: Sequence[str], rows: List[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


SPECFN_HEADER = ("kappa", "u", "rho", "lambda", "j", "mu", "xi", "rho_asym", "ratio")


def cmd_specfn(args) -> int:
    if not args.kappa:
        raise InvalidInputError("at least one --kappa is required")
    rows = []
    for kappa in args.kappa:
        table = default_table(kappa)
        for u in _grid(args.u_min, args.u_max, args.u_step):
            rho = float(table.rho(u))
            asym = rho_asymptotic(u, kappa) if u >= 2 else None
            rows.append([
                f"{kappa:g}", fmt(u), fmt(rho), fmt(lambda_kappa(u, table)), fmt(j_kappa(u, table)),
                fmt(mu_kappa(u, kappa)) if u > 0 else "", fmt(xi_kappa(u, kappa)) if u > 0 else "",
                fmt(asym), fmt(rho / asym) if asym else "",
            ])
    _emit(_csv_text(SPECFN_HEADER, rows), args.out)
    return EXIT_OK


FRIABLE_HEADER = ("x", "y", "u", "psi", "f1y", "psi_star", "lambda_u", "deviation",
                  "saddle_envelope", "error_envelope", "rankin_bound", "status")


def _load_spec(path: Optional[str]) -> MultiplicativeSpec:
    if path is None:
        return MultiplicativeSpec.tau_kappa(1.0)
    return MultiplicativeSpec.from_json(Path(path).read_text(encoding="utf-8"))


def cmd_friable(args) -> int:
    spec = _load_spec(args.spec)
    if args.kappa:
        kappa = args.kappa[0]
    else:
        kappa = spec.natural_kappa
        if kappa is None:
            raise InvalidInputError("this spec has no natural kappa; pass --kappa")
    if not args.y_list:
        raise InvalidInputError("--y-list is required")
    table = default_table(kappa)
    rows, skipped = [], 0
    for y in args.y_list:
        for u in _grid(args.u_min, args.u_max, args.u_step):
            x = y ** u
            try:
                r = friable_report(x, y, kappa, spec, table, budget=args.budget)
                rb = rankin_bound(x, y, kappa, spec)
            except BudgetExceededError as exc:
                skipped += 1
                log.warning("skipped x=%s y=%s: %s", fmt(x), fmt(y), exc)
                rows.append([fmt(x), fmt(y), fmt(u)] + [""] * 8 + ["skipped"])
                continue
            rows.append([fmt(r.x), fmt(r.y), fmt(r.u), fmt(r.psi), fmt(r.f1y), fmt(r.psi_star),
                         fmt(r.lambda_u), fmt(r.deviation), fmt(r.saddle_envelope),
                         fmt(r.error_envelope), fmt(rb), "ok"])
    _emit(_csv_text(FRIABLE_HEADER, rows), args.out)
    if skipped:
        print(f"warning: {skipped} grid points skipped (budget)", file=sys.stderr)
    return EXIT_OK


VERIFY_HEADER = ("suite", "instance", "params", "lhs", "rhs", "relative_residual", "tolerance", "status")


def cmd_verify(args) -> int:
    suites = args.suite or list(SUITES)
    unknown = [s for s in suites if s not in SUITES]
    if unknown:
        raise InvalidInputError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    failures = []
    for name in suites:
        rows = []
        for row, tol, ok in run_suite(name, args.seed, args.tol):
            rows.append([row.suite, row.instance, row.params, fmt(row.lhs), fmt(row.rhs),
                         fmt(row.residual), fmt(tol), "PASS" if ok else "FAIL"])
            if not ok:
                failures.append((name, row.instance))
        text = _csv_text(VERIFY_HEADER, rows)
        if out_dir:
            (out_dir / f"{name}.csv").write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        n_fail = sum(1 for r in rows if r[-1] == "FAIL")
        print(f"{name}: {len(rows) - n_fail}/{len(rows)} passed", file=sys.stderr)
    for name, iid in failures:
        print(f"FAIL {name} {iid} (seed {args.seed})", file=sys.stderr)
    return EXIT_FAIL if failures else EXIT_OK


def cmd_sieve(args) -> int:
    if not args.instance:
        raise InvalidInputError("--instance is required")
    docs = load_instances(Path(args.instance).read_text(encoding="utf-8"))
    rows = []
    for i, d in enumerate(docs):
        rows.append((str(d.get("id", i)) if isinstance(d, dict) else str(i),
                     run_instance({k: v for k, v in d.items() if k != "id"}, brute=args.brute)))
    _emit(reports_to_csv(rows), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    """Wall-clock timings of the main kernels."""
    from .arith.sums import psi_f
    from .sieve.poly import rho_poly

    timings: Dict[str, float] = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        fn()
        timings[name] = time.perf_counter() - t0

    kappa = args.kappa[0] if args.kappa else 1.0
    timed("rho_table", lambda: default_table.__wrapped__(kappa))
    timed("psi_f_1e7", lambda: psi_f(1e7, 100.0, MultiplicativeSpec.tau_kappa(1.0)))
    timed("rho_poly_hensel", lambda: rho_poly(3 ** 12, (-1, 0, 1), method="hensel"))
    timed("verify_quadform", lambda: run_suite("quadform", args.seed))
    rows = [[k, fmt(v)] for k, v in timings.items()]
    _emit(_csv_text(("kernel", "seconds"), rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="friable", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=False):
        sp.add_argument("--kappa", type=float, nargs="*", default=None)
        sp.add_argument("--out", default=None, help="output path (stdout when omitted)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        if grid:
            sp.add_argument("--u-min", type=float, default=0.0)
            sp.add_argument("--u-max", type=float, default=5.0)
            sp.add_argument("--u-step", type=float, default=0.5)

    s = sub.add_parser("specfn", help="tabulate rho, lambda, j, mu, xi")
    common(s, grid=True)
    s.set_defaults(func=cmd_specfn)

    s = sub.add_parser("friable", help="friable sums over a (u, y) grid")
    common(s, grid=True)
    s.add_argument("--y-list", type=float, nargs="+")
    s.add_argument("--spec", default=None, help="JSON file with a multiplicative function")
    s.set_defaults(func=cmd_friable)

    s = sub.add_parser("verify", help="run the identity suites")
    common(s)
    s.add_argument("--suite", action="append", default=None, help=f"one of {', '.join(SUITES)}")
    s.add_argument("--tol", type=float, default=None, help="override every tolerance")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sieve", help="Selberg bound for sieve instances")
    common(s)
    s.add_argument("--instance", default=None, help="JSON file with one instance or a list")
    s.add_argument("--brute", action="store_true", help="also count the sifted set directly")
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("bench", help="time the main kernels")
    common(s)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidInputError, TableRangeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FriableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
