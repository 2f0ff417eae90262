"""Command line entry point: ``spacingbound <command> [options]``.

Exit codes: 0 all checks pass, 1 a bound or growth check failed, 2 bad
configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import traceback
import warnings

import numpy as np

from . import __version__
from .bounds import VIOLATION_TAU, h_of, sharpness_probe, verify_bound
from .eigensolver import (
    AmbiguousCountError,
    EigenWarning,
    MissedCrossingError,
    eigenvalues_in_window,
    fd_oracle_eigenvalues,
)
from .norms import norm_report
from .potential import PotentialError, PotentialSpec, QuadratureError, build_potential
from .prufer import IntegrationError, Tolerance, default_tolerance
from . import reports

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
ORACLE_REL_TOL = 1e-4

SWEEP_DEFAULTS = {
    "zero": {},
    "exponential": {"c": 4.0, "lam": 1.0},
    "power": {"c": 1.0, "gamma": 0.5},
    "wigner_von_neumann": {"c": 2.0, "omega": 2.0, "gamma": 1.0},
    "step_sequence": {"c": 1.0, "eta": 0.5},
    "bump_train": {"bumps": [[0.0, 1.0, 1.0], [4.0, 5.0, 1.0], [16.0, 17.0, 1.0], [64.0, 65.0, 1.0]]},
    "random_decaying": {"c": 1.0, "eta": 0.5, "seed": 0},
}
SWEEP_FAMILIES = ("zero", "exponential", "power", "wigner_von_neumann", "step_sequence")


class ConfigError(ValueError):
    pass


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_spec(args) -> PotentialSpec:
    """Potential from --potential (JSON text or a file path) or --family/--param."""
    if args.potential and args.family:
        raise ConfigError("give either --potential or --family, not both")
    if args.potential:
        text = args.potential
        if not text.lstrip().startswith("{"):
            try:
                with open(text, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"potential: cannot read {args.potential!r}: {exc.strerror}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"potential: not a JSON document ({exc.msg})") from None
        spec = PotentialSpec.from_dict(doc)
    elif args.family:
        params = {}
        for item in args.param or []:
            if "=" not in item:
                raise ConfigError(f"param: expected key=value, got {item!r}")
            key, value = item.split("=", 1)
            params[key.strip()] = _parse_value(value)
        spec = PotentialSpec(args.family, params, args.support_start)
    else:
        raise ConfigError("potential: missing (use --potential or --family)")
    if spec.family == "random_decaying" and "seed" not in spec.params:
        spec = PotentialSpec(spec.family, {**spec.params, "seed": args.seed}, spec.support_start)
    return spec


def _tolerance(args) -> Tolerance:
    base = default_tolerance()
    try:
        return Tolerance(args.rtol if args.rtol is not None else base.rel,
                         args.atol if args.atol is not None else base.abs)
    except ValueError as exc:
        raise ConfigError(f"tolerance: {exc}") from None


def _emit(args, text: str, suffix: str = ""):
    if args.output in (None, "-"):
        sys.stdout.write(text)
        return
    path = args.output
    if suffix:
        root, ext = os.path.splitext(path)
        path = f"{root}{suffix}{ext or '.csv'}"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _positive(name, value):
    if value is None or not (value > 0 and math.isfinite(value)):
        raise ConfigError(f"{name}: must be a finite number > 0, got {value!r}")


def cmd_eigenvalues(args) -> int:
    pot = build_potential(load_spec(args))
    _positive("X", args.X)
    _positive("k-lo", args.k_lo)
    if not args.k_hi > args.k_lo:
        raise ConfigError("k-hi: must exceed k-lo")
    tol = _tolerance(args)
    es = eigenvalues_in_window(pot, args.X, args.k_lo, args.k_hi, tol, root_tol=args.root_tol)
    oracle = None
    status = EXIT_OK
    if args.oracle:
        oracle = fd_oracle_eigenvalues(pot, args.X, args.k_lo**2, args.k_hi**2)
        if len(oracle) != len(es):
            print(f"oracle count {len(oracle)} differs from prufer count {len(es)}", file=sys.stderr)
            status = EXIT_VIOLATION
        elif len(es) and np.max(np.abs(es.eigen_energies - oracle.eigen_energies) / np.abs(oracle.eigen_energies)) >= ORACLE_REL_TOL:
            status = EXIT_VIOLATION
    if args.format == "json":
        doc = {"potential": pot.spec.to_dict(), "prufer": es.to_dict()}
        if oracle is not None:
            doc["oracle"] = oracle.to_dict()
        _emit(args, reports.json_text(doc))
    else:
        header = reports.EIGEN_HEADER + (("oracle_E", "rel_diff") if oracle is not None else ())
        _emit(args, reports.csv_text(header, reports.eigen_rows(es, oracle)))
        if oracle is not None and args.output not in (None, "-"):
            _emit(args, reports.csv_text(reports.EIGEN_HEADER, reports.eigen_rows(oracle)), ".oracle")
    return status


def cmd_verify_bound(args) -> int:
    pot = build_potential(load_spec(args))
    _positive("a", args.a)
    for X in args.X:
        _positive("X", X)
    if not args.k_hi > args.a:
        raise ConfigError("k-hi: must exceed a")
    if not 0.0 < args.stride <= 1.0:
        raise ConfigError("stride: must lie in (0, 1]")
    _positive("h-scale", args.h_scale)
    report = verify_bound(pot, args.a, args.X, args.k_hi, args.stride, args.h_scale,
                          args.method, _tolerance(args), args.threads)
    if args.format == "json":
        _emit(args, reports.json_text(report.to_dict()))
    else:
        _emit(args, reports.csv_text(reports.BOUND_HEADER, reports.bound_rows(report)))
    if report.violations:
        print(f"{len(report.violations)} window(s) of width {args.h_scale:g} h(X) without an eigenvalue",
              file=sys.stderr)
    return EXIT_VIOLATION if report.violations else EXIT_OK


def spacing_rows(es, h):
    k, E = es.eigen_momenta, es.eigen_energies
    rows = []
    for i in range(len(k)):
        dk = float(k[i] - k[i - 1]) if i else math.nan
        dE = float(E[i] - E[i - 1]) if i else math.nan
        rows.append((float(k[i]), dk, float(E[i]), dE, h, dk / h if i else math.nan))
    return rows


def cmd_spacing(args) -> int:
    pot = build_potential(load_spec(args))
    _positive("X", args.X)
    _positive("k-lo", args.k_lo)
    if not args.k_hi > args.k_lo:
        raise ConfigError("k-hi: must exceed k-lo")
    a = args.a if args.a is not None else args.k_lo
    _positive("a", a)
    if a > args.k_lo:
        raise ConfigError("a: must not exceed k-lo (windows must sit inside [a, inf))")
    h = h_of(pot, a, args.X)
    es = eigenvalues_in_window(pot, args.X, args.k_lo, args.k_hi, _tolerance(args))
    rows = spacing_rows(es, h) if len(es) >= 2 else []
    if len(es) < 2:
        print(f"warning: {len(es)} eigenvalue(s) in window, no spacings", file=sys.stderr)
    max_ratio = max((r[5] for r in rows[1:]), default=math.nan)
    if args.format == "json":
        doc = {"potential": pot.spec.to_dict(), "X": args.X, "a": a, "h": h,
               "eigen_momenta": es.eigen_momenta.tolist(), "max_dk_over_h": max_ratio}
        _emit(args, reports.json_text(doc))
    else:
        _emit(args, reports.csv_text(reports.SPACING_HEADER, rows))
    return EXIT_VIOLATION if (rows and max_ratio > 1.0 + VIOLATION_TAU) else EXIT_OK


def cmd_norms(args) -> int:
    pot = build_potential(load_spec(args))
    if not args.p > 1.0:
        raise ConfigError("p: must be > 1")
    if args.N < 1:
        raise ConfigError("N: must be >= 1")
    grid = np.unique(np.concatenate((2.0 ** np.arange(0, int(math.log2(args.N)) + 1), [float(args.N)])))
    report = norm_report(pot, args.p, args.N, grid, fit=not args.no_fit)
    trace = report.growth_ratio_trace
    ok = bool(np.all(trace.ratio <= trace.cap + 1e-9))
    if args.format == "json":
        doc = report.to_dict()
        doc["potential"] = pot.spec.to_dict()
        doc["cap_respected"] = ok
        _emit(args, reports.json_text(doc))
    else:
        _emit(args, reports.csv_text(reports.TRACE_HEADER, trace.rows()))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_sharpness(args) -> int:
    _positive("X", args.X)
    if args.m < 1:
        raise ConfigError("m: must be >= 1")
    if not 0.0 < args.epsilon < math.pi / (2.0 * args.X):
        raise ConfigError("epsilon: must lie in (0, pi/(2X))")
    ok = sharpness_probe(args.X, args.m, args.epsilon)
    lo = args.m * math.pi / args.X + args.epsilon
    hi = (args.m + 1) * math.pi / args.X - args.epsilon
    if args.format == "json":
        _emit(args, reports.json_text({"X": args.X, "m": args.m, "epsilon": args.epsilon,
                                       "k_lo": lo, "k_hi": hi, "passed": ok}))
    else:
        _emit(args, reports.csv_text(("X", "m", "epsilon", "k_lo", "k_hi", "passed"),
                                     [(args.X, args.m, args.epsilon, lo, hi, ok)]))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    _positive("a", args.a)
    for X in args.X:
        _positive("X", X)
    rows = []
    total = 0
    for fam in args.families:
        if fam not in SWEEP_DEFAULTS:
            raise ConfigError(f"families: unknown family {fam!r}")
        params = dict(SWEEP_DEFAULTS[fam])
        if fam == "random_decaying":
            params["seed"] = args.seed
        pot = build_potential(PotentialSpec(fam, params))
        for X in args.X:
            rep = verify_bound(pot, args.a, [X], args.k_hi, args.stride, args.h_scale,
                               tol=_tolerance(args), threads=1)
            total += len(rep.violations)
            rows.append((fam, float(X), rep.h_values[0], rep.windows_checked, len(rep.violations),
                         rep.slack_stats.get(float(X), 0), not rep.violations))
    if args.format == "json":
        keys = reports.SWEEP_HEADER
        _emit(args, reports.json_text({"a": args.a, "k_hi": args.k_hi, "total_violations": total,
                                       "rows": [dict(zip(keys, r)) for r in rows]}))
    else:
        _emit(args, reports.csv_text(reports.SWEEP_HEADER, rows))
    return EXIT_VIOLATION if total else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spacingbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", help="potential document (JSON text or path to a JSON file)")
    common.add_argument("--family", help="potential family (alternative to --potential)")
    common.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter, repeatable")
    common.add_argument("--support-start", type=float, default=0.0)
    common.add_argument("--seed", type=int, default=0, help="seed for random families without one")
    common.add_argument("-o", "--output", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--rtol", type=float, default=None, help="phase integrator relative tolerance")
    common.add_argument("--atol", type=float, default=None, help="phase integrator absolute tolerance")
    common.add_argument("--threads", type=int, default=1)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigenvalues", parents=[common], help="Dirichlet eigenvalues in a momentum window")
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--k-lo", type=float, required=True)
    p.add_argument("--k-hi", type=float, required=True)
    p.add_argument("--root-tol", type=float, default=1e-10)
    p.add_argument("--oracle", action="store_true", help="also run the finite-difference oracle")
    p.set_defaults(func=cmd_eigenvalues)

    p = sub.add_parser("verify-bound", parents=[common], help="sliding-window check of the spacing bound")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--X", type=float, nargs="+", required=True)
    p.add_argument("--k-hi", type=float, default=10.0)
    p.add_argument("--stride", type=float, default=0.25, help="window step as a fraction of h(X)")
    p.add_argument("--h-scale", type=float, default=1.0, help="diagnostic: scale h(X) (values < 1 should fail)")
    p.add_argument("--method", choices=("phase", "window"), default="phase")
    p.set_defaults(func=cmd_verify_bound)

    p = sub.add_parser("spacing", parents=[common], help="consecutive eigenvalue gaps against h(X)")
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--k-lo", type=float, required=True)
    p.add_argument("--k-hi", type=float, required=True)
    p.add_argument("--a", type=float, default=None, help="momentum floor for h (default k-lo)")
    p.set_defaults(func=cmd_spacing)

    p = sub.add_parser("norms", parents=[common], help="amalgamated norms and growth traces")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--N", type=int, default=10_000)
    p.add_argument("--no-fit", action="store_true", help="skip the growth-exponent fit")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("sweep", parents=[common], help="verify-bound across potential families")
    p.add_argument("--families", nargs="+", default=list(SWEEP_FAMILIES))
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--X", type=float, nargs="+", default=[10.0, 100.0])
    p.add_argument("--k-hi", type=float, default=10.0)
    p.add_argument("--stride", type=float, default=0.25)
    p.add_argument("--h-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sharpness", parents=[common], help="free-case probe just below h = pi/X")
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(func=cmd_sharpness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EigenWarning)
            return args.func(args)
    except (ConfigError, PotentialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, QuadratureError, MissedCrossingError, AmbiguousCountError, ArithmeticError) as exc:
        print("numerical failure:", file=sys.stderr)
        print(f"  command: {args.command}", file=sys.stderr)
        print(f"  {type(exc).__name__}: {exc}", file=sys.stderr)
        print("  " + traceback.format_exc(limit=3).replace("\n", "\n  "), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
