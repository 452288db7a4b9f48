"""Command-line front end: ``hochlab <suite>``, ``explain-contradiction``, ``verify-witness``.

Exit codes: 0 when every check passes, 1 on a check failure (or a witness
that does not re-verify), 2 on a configuration or input error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib import resources
from typing import List, Optional

from . import obstruction as O
from . import starprod as S
from .suites import REPORT_SCHEMA, SUITE_NAMES, ConfigError, RunConfig, run_suites, verify_report

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def conventions_text() -> str:
    return resources.files("hochlab").joinpath("CONVENTIONS.md").read_text(encoding="utf-8")


def conventions_fingerprint() -> str:
    return "sha256:" + hashlib.sha256(conventions_text().encode("utf-8")).hexdigest()


# -- configuration ------------------------------------------------------------------


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--dim", type=int)
    p.add_argument("--theta", help='JSON matrix of rationals, e.g. [["0","1"],["-1","0"]]')
    p.add_argument("--order", type=int, dest="hbar_order", help="hbar truncation order N")
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("text", "json"))
    p.add_argument("--out", help="write the report to this file")
    p.add_argument("--D", type=int, dest="obstruction_D", help="obstruction degree bound D")
    p.add_argument("--Dpairs", type=int, dest="obstruction_Dpairs", help="obstruction pair bound Dpairs")
    p.add_argument("--scale", type=float, help="multiply randomized instance counts")


def build_config(args: argparse.Namespace, suite: Optional[str]) -> RunConfig:
    """File values, then flag overrides, then validation."""
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    for key in ("dim", "hbar_order", "seed", "format", "obstruction_D", "obstruction_Dpairs", "scale"):
        v = getattr(args, key, None)
        if v is not None:
            data[key] = v
    if getattr(args, "theta", None) is not None:
        try:
            data["theta"] = json.loads(args.theta)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--theta is not JSON: {exc}") from None
    if suite is not None:
        data["suite"] = suite
    return RunConfig.from_dict(data)


# -- output ---------------------------------------------------------------------------


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_report(cfg: RunConfig, timing: bool = False) -> dict:
    suites = run_suites(cfg, clock=time.perf_counter if timing else None)
    status = "PASS" if all(s["status"] == "PASS" for s in suites) else "FAIL"
    return {"schema": REPORT_SCHEMA, "config": cfg.echo(), "conventions_fingerprint": conventions_fingerprint(),
            "status": status, "suites": suites}


def format_report_text(report: dict) -> str:
    lines = [f"hochlab report ({report['schema']}), conventions {report['conventions_fingerprint'][:19]}"]
    for suite in report["suites"]:
        lines.append(f"[{suite['status']}] {suite['suite']}")
        for c in suite["checks"]:
            extra = f" - {c['detail']}" if c.get("detail") else ""
            t = f" {c['elapsed']}s" if c.get("elapsed") is not None else ""
            lines.append(f"  {c['status']:4} {c['check']} ({c['instances']} instances{t}){extra}")
            if c["status"] != "PASS" and c.get("witness"):
                lines.append(f"       witness: {json.dumps(c['witness'], sort_keys=True)[:400]}")
    lines.append(f"overall: {report['status']}")
    return "\n".join(lines) + "\n"


def format_transcript_text(tr: O.Transcript) -> str:
    lines = [f"Replay of the two-dimensional elimination (D={tr.bounds[0]}, Dpairs={tr.bounds[1]})"]
    for i, step in enumerate(tr.steps, 1):
        mark = "ok" if step.in_row_space else "MISMATCH"
        lines.append(f"{i:2}. {step.name} [{mark}]")
        lines.append(f"    {step.description}")
        for c in step.constraints:
            lines.append(f"      {c}")
        if step.printed_form is not None:
            lines.append(f"    printed form: {step.printed_form} "
                         f"({'in' if step.printed_form_in_row_space else 'not in'} the row space)")
    lines.append(f"generic solver: {tr.solver_status}")
    if tr.contradiction:
        lines.append(f"CONTRADICTION: the x-coefficient of P(x^3*y^2) must be both "
                     f"{tr.x_coefficient_raz} and {tr.x_coefficient_dva}")
    else:
        lines.append("no contradiction derived")
    return "\n".join(lines) + "\n"


# -- commands ----------------------------------------------------------------------------


def cmd_suite(args) -> int:
    cfg = build_config(args, args.command)
    report = build_report(cfg, timing=args.timing)
    text = dump_json(report) if cfg.format == "json" else format_report_text(report)
    _emit(text, args.out)
    return EXIT_OK if report["status"] == "PASS" else EXIT_FAIL


def explain_contradiction(cfg: RunConfig):
    """Transcript (or a 'no contradiction' note) at the configured bounds."""
    theta = S.canonical_theta(2)
    if cfg.dim != 2 or (cfg.theta is not None and S.check_theta(cfg.theta) != theta):
        raise ConfigError("explain-contradiction needs d=2 with the canonical theta")
    D, Dp = cfg.obstruction_D, cfg.obstruction_Dpairs
    cert = O.solve_or_certify(O.build_coboundary_system(theta, D, Dp))
    if not cert.infeasible:
        return None, {"status": "no contradiction at these bounds", "bounds": {"D": D, "Dpairs": Dp}}
    tr = O.reproduce_paper_contradiction(theta, D, Dp)
    return tr, tr.to_json()


def cmd_explain(args) -> int:
    cfg = build_config(args, None)
    tr, data = explain_contradiction(cfg)
    if cfg.format == "json":
        text = dump_json(data)
    elif tr is None:
        b = data["bounds"]
        text = f"no contradiction at these bounds (D={b['D']}, Dpairs={b['Dpairs']}): the system is solvable\n"
    else:
        text = format_transcript_text(tr)
    _emit(text, args.out)
    if tr is not None and not (tr.contradiction and tr.consistent):
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.report, encoding="utf-8") as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"hochlab: cannot read report: {exc}\n")
        return EXIT_CONFIG
    if not isinstance(report, dict) or report.get("schema") != REPORT_SCHEMA:
        sys.stderr.write(f"hochlab: not a {REPORT_SCHEMA} report\n")
        return EXIT_CONFIG
    results = verify_report(report)
    for r in results:
        sys.stdout.write(f"{'ok  ' if r['ok'] else 'BAD '} {r['check']} ({r['kind']})\n")
    sys.stdout.write(f"{sum(r['ok'] for r in results)}/{len(results)} witnesses re-verified\n")
    if report.get("conventions_fingerprint") != conventions_fingerprint():
        sys.stdout.write("note: report was produced under a different conventions ledger\n")
    return EXIT_OK if all(r["ok"] for r in results) else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hochlab", description="Exact Hochschild-calculus verification harness")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUITE_NAMES + ("all",):
        p = sub.add_parser(name, help=f"run the {name} suite" if name != "all" else "run every suite")
        _common_flags(p)
        p.add_argument("--timing", action="store_true", help="record wall-clock time per check (not deterministic)")
        p.set_defaults(func=cmd_suite)
    p = sub.add_parser("explain-contradiction", help="replay the elimination behind the obstruction")
    _common_flags(p)
    p.set_defaults(func=cmd_explain)
    p = sub.add_parser("verify-witness", help="re-verify every witness in a JSON report")
    p.add_argument("report")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors are configuration errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"hochlab: configuration error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
