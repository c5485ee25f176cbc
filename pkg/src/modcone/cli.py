"""Command-line entry point.

Subcommands::

    modcone audit --builtin phi-scaled --samples 10000 --seed 7 --out report.json
    modcone xi --e 1,1 --y 3,-1 [--cone cone.json]
    modcone iterate --builtin half-shift --x0 0 [--starts 0,100,-50] --out run/
    modcone counterexample [--grid-step 1e-3] --out ledger.json

Exit codes: 0 success, 1 audit failure, 2 config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import catalog
from .cone import ConeError, as_vector, fixed_cone, load_cone, orthant
from .counterexample import DEFAULT_GRID_STEP, run_counterexample
from .fixed_point import CONVERGED, UNIQUE, contraction_audit, picard, uniqueness_probe
from .metrics import scalarize
from .report import SCHEMA_VERSION, dump_json
from .scalarization import ScalarizationContext, ScalarizationError, xi, xi_oracle

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


class _IOFailure(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise catalog.ConfigError(f"malformed number list {text!r}") from exc


def cmd_audit(args) -> int:
    if args.config is not None:
        cfg = catalog.load_config(args.config)
        name = cfg.get("builtin")
        if not name:
            raise catalog.ConfigError("config needs a 'builtin' entry")
        run = catalog.audit_builtin(name, cfg.get("cone"), cfg.get("space"))
        seed = int(cfg.get("seed", args.seed))
        samples = int(cfg.get("samples", args.samples))
    else:
        run = catalog.audit_builtin(args.builtin)
        seed, samples = args.seed, args.samples
    report = run(seed, samples)
    _emit(report.dumps(), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_xi(args) -> int:
    e = _floats(args.e)
    y = _floats(args.y)
    try:
        if args.cone is not None:
            try:
                cone = load_cone(args.cone)
            except FileNotFoundError as exc:
                raise catalog.ConfigError(f"cone file not found: {args.cone}") from exc
        elif args.cone_name is not None:
            cone = fixed_cone(args.cone_name)
        else:
            cone = orthant(len(e))
        ctx = ScalarizationContext(cone, e)
        yv = as_vector(y, cone.dim)
        value, oracle = xi(ctx, yv), xi_oracle(ctx, yv)
    except (ConeError, ScalarizationError, KeyError) as exc:
        raise catalog.ConfigError(str(exc)) from exc
    _emit(dump_json({"xi": value, "xi_oracle": oracle, "diff": abs(value - oracle)}), args.out)
    return EXIT_OK


def cmd_iterate(args) -> int:
    cfg = catalog.load_config(args.config) if args.config is not None else {}
    setup = catalog.iteration_builtin(
        cfg.get("map", args.builtin), k=cfg.get("k", args.k), c0=cfg.get("c0"),
        slope=cfg.get("slope"), shift=cfg.get("shift"),
    )
    W = scalarize(setup.w, e=np.ones(setup.w.cone.dim))
    audit = contraction_audit(setup.w, setup.spec, setup.space, args.samples, args.seed)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "subject": f"iterate[{setup.spec.name}]",
        "seed": args.seed,
        "contraction_audit": audit.to_json(),
        "iteration": None,
        "uniqueness": None,
        "skipped": False,
    }
    traces = {}
    ok = audit.passed
    if not audit.passed and not args.run_anyway:
        summary["skipped"] = True
    elif args.starts:
        probe = uniqueness_probe(setup.spec, W, _floats(args.starts), tol=args.tol,
                                 max_iter=args.max_iter)
        summary["uniqueness"] = probe.to_json()
        traces = {f"trace_{i}.csv": t for i, t in enumerate(probe.traces)}
        ok = ok and probe.verdict == UNIQUE
    else:
        trace = picard(setup.spec, W, args.x0, tol=args.tol, max_iter=args.max_iter)
        summary["iteration"] = trace.summary()
        traces = {"trace.csv": trace}
        ok = ok and trace.verdict == CONVERGED

    if args.out is None:
        _emit(dump_json(summary), None)
    else:
        out = Path(args.out)
        for fname, trace in traces.items():
            _emit(trace.to_csv(), str(out / fname))
        _emit(dump_json(summary), str(out / "summary.json"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_counterexample(args) -> int:
    if not args.grid_step > 0:
        raise catalog.ConfigError("--grid-step must be positive")
    ledger = run_counterexample(args.grid_step, samples=args.samples, seed=args.seed)
    _emit(dump_json(ledger), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modcone", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", help="run an axiom audit and write an AuditReport")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=catalog.AUDIT_BUILTINS)
    src.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("xi", help="evaluate the scalarization and its bisection oracle")
    p.add_argument("--cone", help="cone JSON file")
    p.add_argument("--cone-name", help="fixed cone name (orthantM, wedge2, pyramid3, hexcone3)")
    p.add_argument("--e", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("iterate", help="contraction audit followed by Picard iteration")
    p.add_argument("--builtin", default="half-shift", choices=("half-shift", "identity", "affine"))
    p.add_argument("--config")
    p.add_argument("--k", type=float, default=0.75)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--starts")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--run-anyway", action="store_true",
                   help="iterate even when the contraction audit fails")
    p.add_argument("--out", help="output directory for trace CSV and summary.json")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("counterexample", help="claim ledger for the two-segment example")
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except catalog.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
