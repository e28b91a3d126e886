"""Command-line entry point: ``semirandom {analyze,simulate,sweep,verify,oracle}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

from . import analysis, oracle
from .hypergraph import ParameterError, ResourceError, TargetSpec, build_target
from .montecarlo import ConfigError, ExperimentConfig, resolve_threads, sweep_and_fit
from .process import run, trace_to_csv
from .strategies import make_strategy

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2


def write_atomic(path: str | None, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename; stdout when path is None."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, payload: dict, header, rows) -> None:
    write_atomic(args.out, _csv(header, rows) if args.format == "csv" else _json(payload))


def _load_json_arg(text: str, field_name: str):
    """Inline JSON, or ``@path`` to read it from a file."""
    try:
        if text.startswith("@"):
            with open(text[1:]) as fh:
                return json.load(fh)
        return json.loads(text)
    except FileNotFoundError as exc:
        raise ConfigError(field_name, f"file not found: {exc.filename}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(field_name, f"invalid JSON ({exc.msg})") from exc


def _target(text: str) -> TargetSpec:
    d = _load_json_arg(text, "target")
    try:
        return TargetSpec.from_dict(d)
    except (ParameterError, TypeError, KeyError) as exc:
        raise ConfigError("target", str(exc)) from exc


# ---------------------------------------------------------------- commands

def cmd_analyze(args) -> int:
    spec = _target(args.target)
    H = build_target(spec)
    d = analysis.threshold_report(H, args.r).to_dict()
    rows = [["lower", b["source"], b["exponent"]["num"], b["exponent"]["den"], b["exponent"]["approx"]]
            for b in d["lower_bounds"]]
    rows += [["upper", b["source"], b["exponent"]["num"], b["exponent"]["den"], b["exponent"]["approx"]]
             for b in d["upper_bounds"]]
    for key in ("best_lower", "best_upper"):
        if d[key] is not None:
            rows.append([key, "", d[key]["num"], d[key]["den"], d[key]["approx"]])
    _emit(args, d, ["kind", "source", "num", "den", "approx"], rows)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.seed is None:
        raise ConfigError("seed", "required for simulate")
    spec = _target(args.target)
    H = build_target(spec)
    params = _load_json_arg(args.params, "params") if args.params else {}
    strat = make_strategy(args.strategy, spec, args.r, **params)
    out = run(args.n, args.r, H.s, strat, H, args.budget, record_trace=True, seed=args.seed, trial=args.trial)
    if args.format == "csv":
        write_atomic(args.out, trace_to_csv(out.trace))
    else:
        write_atomic(args.out, _json({"n": args.n, "r": args.r, "budget": args.budget, "seed": args.seed,
                                      "trial": args.trial, "strategy": args.strategy,
                                      "success_step": out.success_step, "steps": out.steps,
                                      "duplicate_draws": out.duplicate_draws,
                                      "edges": out.final_graph.num_edges,
                                      "trace": [[step, list(U), list(V), int(dup)]
                                                for step, U, V, dup in out.trace]}))
    return EXIT_OK


def cmd_sweep(args) -> int:
    d = _load_json_arg("@" + args.config, "config")
    if args.seed is not None:
        d = {**d, "seed": args.seed}
    if "seed" not in d:
        raise ConfigError("seed", "required for sweep")
    cfg = ExperimentConfig.from_dict(d)
    res = sweep_and_fit(cfg, threads=resolve_threads(args.threads))
    write_atomic(args.out, res.to_csv() if args.format == "csv" else res.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite == "appendix":
        ranges = _load_json_arg(args.ranges, "ranges") if args.ranges else None
        claims = args.claims.split(",") if args.claims else None
        try:
            results = oracle.verify_appendix(ranges, claims)
        except TypeError as exc:
            raise ConfigError("ranges", str(exc)) from exc
        report = {"suite": "appendix", "all_pass": all(r.status == "pass" for r in results),
                  "claims": [r.to_dict() for r in results]}
    else:
        seed = 0 if args.seed is None else args.seed
        from .process import duplicate_rate_check, expected_duplicates
        n, r, t = 1000, 2, 1000
        observed = duplicate_rate_check(n, r, t, trials=50, seed=seed)
        report = {"suite": "engine", "n": n, "r": r, "t": t, "mean_duplicates": observed,
                  "expected_duplicates": expected_duplicates(n, r, t)}
        _emit(args, report, ["n", "r", "t", "mean_duplicates", "expected_duplicates"],
              [[n, r, t, report["mean_duplicates"], report["expected_duplicates"]]])
        return EXIT_OK
    _emit(args, report, ["claim", "status", "checked", "counterexample"],
          [[c["claim"], c["status"], c["checked"], json.dumps(c.get("counterexample"))]
           for c in report["claims"]])
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.kind == "hit":
        required = _load_json_arg(args.required, "required")
        res = oracle.exact_hit_probability([(tuple(e), m) for e, m in required], args.n, args.r, args.t,
                                           mode=args.mode)
        payload = {"n": args.n, "r": args.r, "t": args.t, **res.to_dict()}
    elif args.kind == "phi":
        spec = _target(args.target)
        p = Fraction(args.p)
        res = oracle.phi_F(build_target(spec), args.n, p)
        payload = {"n": args.n, "p": str(p), "log_value": res.log_value, "v": res.v, "e": res.e,
                   "vertices": list(res.vertices)}
    else:
        exact = oracle.double_k4_expected(args.n, args.t)
        payload = {"n": args.n, "t": args.t, "expected_count": exact}
    _emit(args, payload, ["key", "value"],
          [[k, json.dumps(v) if isinstance(v, list) else v] for k, v in sorted(payload.items())])
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None,
                        help="trial-level worker processes (default: $SEMIRANDOM_THREADS or 1)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="json")

    p = argparse.ArgumentParser(prog="semirandom", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="threshold bounds for a target")
    a.add_argument("--target", required=True, help="TargetSpec JSON or @file")
    a.add_argument("--r", type=int, required=True)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", parents=[common], help="play one game")
    s.add_argument("--target", required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--strategy", required=True)
    s.add_argument("--params", default=None, help="strategy parameters as JSON")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--budget", type=int, required=True)
    s.add_argument("--trial", type=int, default=0)
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", parents=[common], help="success curves and exponent fit")
    w.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", parents=[common], help="verification suites")
    v.add_argument("--suite", choices=("appendix", "engine"), required=True)
    v.add_argument("--claims", default=None, help="comma-separated claim ids")
    v.add_argument("--ranges", default=None, help="JSON overrides of enumeration ranges")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", parents=[common], help="exact probability tools")
    o.add_argument("kind", choices=("hit", "phi", "double-k4"))
    o.add_argument("--required", default=None, help='JSON list of [r-set, multiplicity] pairs')
    o.add_argument("--target", default=None)
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--r", type=int, default=2)
    o.add_argument("--t", type=int, default=0)
    o.add_argument("--p", default=None, help="edge probability as a fraction, e.g. 1/100")
    o.add_argument("--mode", choices=("auto", "exact", "float"), default="auto")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "oracle":
        need = {"hit": ["required"], "phi": ["target", "p"], "double-k4": []}[args.kind]
        missing = [name for name in need if getattr(args, name) is None]
        if missing:
            print(f"error: {missing[0]}: missing", file=sys.stderr)
            return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceError, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
