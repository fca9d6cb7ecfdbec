"""Command-line harness: verify, detgen, reduce, catalog, residual.

Exit status: 0 when every expectation is met, 1 on a verdict mismatch,
2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import catalog
from .checker import determining_equations, first_type_determining_equations
from .expr import ExprError, param
from .model import DLVSystem, load_system
from .parser import parse
from .reduction import (
    DEFAULT_PARAMS,
    ExampleParams,
    competition_system,
    exact_solution_7a,
    reduce_example,
    residual_numeric,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class CampaignConfig:
    table: int | None = None
    case: int | None = None
    seeds: list[int] = field(default_factory=list)
    mode: str = "symbolic"
    output: str | None = None
    hierarchy: bool = False
    timing: bool = False

    def __post_init__(self):
        if self.mode not in ("symbolic", "instance", "both"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.mode != "symbolic" and not self.seeds:
            self.seeds = [0]

    def as_dict(self) -> dict:
        return {"table": self.table, "case": self.case, "seeds": self.seeds,
                "mode": self.mode, "hierarchy": self.hierarchy}


def run_verify(config: CampaignConfig) -> catalog.Report:
    """Check the selected catalog rows; deterministic for fixed seeds."""
    report = catalog.Report()
    for e in catalog.entries(config.table, config.case):
        for vi, variant in enumerate(e.variants):
            tag = ",".join(f"{k}={v}" for k, v in variant)
            if config.mode in ("symbolic", "both"):
                report.extend(catalog.verify_entry(e, dict(variant), config.hierarchy,
                                                   variant=tag or "generic"))
            if config.mode in ("instance", "both"):
                for seed in config.seeds:
                    assign = catalog.sample_params(e, seed, vi)
                    report.extend(catalog.verify_entry(e, assign, config.hierarchy,
                                                       variant=tag or "generic", seed=seed))
    return report


def _record_dict(r: catalog.Record, timing: bool) -> dict:
    d = r.as_dict()
    if not timing:
        d["elapsed_ms"] = None
    return d


def _record_line(r: catalog.Record) -> str:
    where = f"T{r.table}.{r.case_id}"
    if r.variant and r.variant != "generic":
        where += f"[{r.variant}]"
    if r.seed is not None:
        where += f" seed={r.seed}"
    kind = r.kind + (f"({r.pivot})" if r.pivot else "")
    status = r.verdict if r.expected is None else (
        f"{r.verdict} (expected {r.expected})" + (" MISMATCH" if r.mismatch else ""))
    line = f"{where:<22} {r.operator:<32} {kind:<16} {status}"
    if r.witness and r.mismatch:
        line += f"\n    witness: {r.witness}"
    return line


def _write_json(path: str, doc: dict) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _parse_seeds(values: list[str] | None) -> list[int]:
    out = []
    for v in values or []:
        for piece in v.split(","):
            if piece.strip():
                try:
                    out.append(int(piece))
                except ValueError:
                    raise UsageError(f"bad seed {piece!r}") from None
    return out


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        nt, nx = (int(p) for p in text.split(","))
    except ValueError:
        raise UsageError("--grid expects nt,nx") from None
    if nt < 1 or nx < 1:
        raise UsageError("--grid needs positive sizes")
    return nt, nx


def _parse_domain(text: str) -> tuple[float, float, float, float]:
    try:
        vals = tuple(float(Fraction(p)) for p in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise UsageError("--domain expects t0,t1,x0,x1") from None
    if len(vals) != 4:
        raise UsageError("--domain expects t0,t1,x0,x1")
    return vals


def load_params(path: str | None) -> ExampleParams:
    """Example parameters from a ``key = value`` file over the defaults."""
    values = dict(DEFAULT_PARAMS)
    if path:
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0]
            for piece in line.split(";"):
                if not piece.strip():
                    continue
                key, sep, val = piece.partition("=")
                if not sep:
                    key, sep, val = piece.partition(":")
                key = key.strip()
                if not sep or key not in values:
                    raise UsageError(f"{path}:{lineno}: expected one of "
                                     + ", ".join(values) + " = value")
                values[key] = parse(val.strip())
    return ExampleParams.make(values)


# subcommands ------------------------------------------------------------------

def cmd_verify(args) -> int:
    config = CampaignConfig(args.table, args.case, _parse_seeds(args.seed), args.mode,
                            args.json, args.hierarchy, args.timing)
    report = run_verify(config)
    for r in report.records:
        print(_record_line(r))
    s = report.summary()
    print(f"summary: total={s['total']} passed={s['passed']} failed={s['failed']}")
    if config.output:
        _write_json(config.output, {
            "command": "verify", "config": config.as_dict(),
            "records": [_record_dict(r, config.timing) for r in report.records],
            "summary": s})
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_detgen(args) -> int:
    if args.system:
        system = load_system(Path(args.system).read_text())
    else:
        system = DLVSystem.symbolic()
    if args.equal_lambda:
        lam = param("lambda")
        system = system.subs({param(f"lambda{k}"): lam for k in (1, 2, 3)})
    if args.pivot:
        des = first_type_determining_equations(system, pivot=args.pivot)
    else:
        des = determining_equations(system)
    lines = des.lines()
    same = None
    if args.compare:
        other = (determining_equations(system) if args.pivot
                 else first_type_determining_equations(system, pivot="u"))
        same = other.equations == des.equations
    for line in lines:
        print(line)
    if same is not None:
        print(f"# first-type and Lie sets identical: {same}")
    if args.json:
        _write_json(args.json, {"command": "detgen",
                                "kind": f"FirstType({args.pivot})" if args.pivot else "Lie",
                                "equations": lines, "identical_to_other_kind": same})
    return EXIT_OK if same in (None, True) or not args.expect_identical else EXIT_MISMATCH


def _grid(args) -> tuple[float, float, float, float, int, int]:
    nt, nx = _parse_grid(args.grid)
    t0, t1, x0, x1 = _parse_domain(args.domain)
    return (t0, t1, x0, x1, nt, nx)


def cmd_reduce(args) -> int:
    p = load_params(args.params)
    grid = _grid(args)
    ans, reduced = reduce_example(p)
    sol = exact_solution_7a(p.with_restriction(), args.phi1)
    sym = sol.symbolic_residual()
    sym_zero = all(r.is_zero for r in sym)
    system = competition_system(sol.params)
    num = residual_numeric(system, sol, grid)
    ok = sym_zero and max(num) <= args.tol
    print("ansatz:")
    for n, e in zip("uvw", ans.components()):
        print(f"  {n} = {e}")
    print("reduced ODEs:")
    for line in reduced.lines():
        print(f"  {line}")
    print("exact solution (phi1 = %s):" % sol.phi1_text())
    for n, e in zip("uvw", sol.expressions()):
        print(f"  {n} = {e}")
    print(f"symbolic residual zero: {sym_zero}")
    print("numeric max residual: " + ", ".join(f"{v:.3e}" for v in num))
    if args.json:
        _write_json(args.json, {
            "command": "reduce",
            "params": {k: str(v) for k, v in p.values},
            "ansatz": [str(e) for e in ans.components()],
            "reduced": [str(e) for e in reduced.equations],
            "phi1": sol.phi1_text(),
            "solution": [str(e) for e in sol.expressions()],
            "symbolic_residual_zero": sym_zero,
            "grid": list(grid),
            "numeric_max_residual": list(num),
            "ok": ok})
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_residual(args) -> int:
    p = load_params(args.params)
    sol = exact_solution_7a(p, args.phi1)
    if args.perturb:
        sol = sol.perturbed()
    grid = _grid(args)
    num = residual_numeric(competition_system(sol.params), sol, grid)
    for k, v in enumerate(num, 1):
        print(f"S{k}: {v:.3e}")
    ok = (max(num) > args.tol) if args.perturb else (max(num) <= args.tol)
    if args.json:
        _write_json(args.json, {"command": "residual", "perturbed": args.perturb,
                                "grid": list(grid), "max_residual": list(num),
                                "tolerance": args.tol, "ok": ok})
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_catalog(args) -> int:
    selected = catalog.entries(args.table, args.case)
    if args.json:
        doc = {"command": "catalog", "entries": [{
            "table": e.table, "case_id": e.case_id, "lambdas": list(e.lambdas),
            "reactions": e.reaction_text(),
            "restrictions": [str(r) for r in e.restrictions],
            "operators": [{"label": op.label, "coefficients": list(op.text()),
                           "requires": [str(r) for r in op.requires]} for op in e.operators],
            "expected": e.expected} for e in selected]}
        _write_json(args.json, doc)
    sys.stdout.write(catalog.export_listing(selected))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dlvsym", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check catalog rows against expected verdicts")
    v.add_argument("--table", type=int)
    v.add_argument("--case", type=int)
    v.add_argument("--seed", action="append", help="seed(s), repeatable or comma separated")
    v.add_argument("--mode", default="symbolic", choices=("symbolic", "instance", "both"))
    v.add_argument("--hierarchy", action="store_true",
                   help="also run FirstType and NonClassical checks on Lie operators")
    v.add_argument("--timing", action="store_true", help="include elapsed times in JSON")
    v.add_argument("--json", metavar="PATH")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("detgen", help="print determining equations")
    d.add_argument("system", nargs="?", help="system definition file (default: symbolic DLV)")
    d.add_argument("--pivot", choices=("u", "v", "w"), help="first-type equations for a pivot")
    d.add_argument("--equal-lambda", action="store_true", help="set lambda1=lambda2=lambda3")
    d.add_argument("--compare", action="store_true", help="compare with the other kind")
    d.add_argument("--expect-identical", action="store_true",
                   help="exit 1 unless the compared sets coincide")
    d.add_argument("--json", metavar="PATH")
    d.set_defaults(func=cmd_detgen)

    for name, fn, text in (("reduce", cmd_reduce, "run the reduction example end to end"),
                           ("residual", cmd_residual, "numeric residual of the exact solution")):
        r = sub.add_parser(name, help=text)
        r.add_argument("--params", metavar="FILE")
        r.add_argument("--grid", default="101,101", metavar="NT,NX")
        r.add_argument("--domain", default="0,1,0,1", metavar="T0,T1,X0,X1")
        r.add_argument("--phi1", default="even", choices=("even", "odd", "growing", "decaying"))
        r.add_argument("--tol", type=float, default=1e-9 if name == "reduce" else None)
        r.add_argument("--json", metavar="PATH")
        if name == "residual":
            r.add_argument("--perturb", action="store_true",
                           help="flip the alpha term of the v component")
        r.set_defaults(func=fn)

    c = sub.add_parser("catalog", help="dump catalog rows")
    c.add_argument("--table", type=int)
    c.add_argument("--case", type=int)
    c.add_argument("--json", metavar="PATH")
    c.set_defaults(func=cmd_catalog)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "tol", 0) is None:
        args.tol = 1e-3 if args.perturb else 1e-9
    try:
        return args.func(args)
    except (UsageError, ExprError, OSError, ValueError, FloatingPointError) as err:
        print(f"dlvsym {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
