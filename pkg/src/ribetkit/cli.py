"""Command-line front end: ``ribetkit run`` and ``ribetkit list-checks``.

Every flag can also be set from the environment as ``RIBETKIT_<FLAG>``
(for example ``RIBETKIT_SEED=3``); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import jsonschema

from .checks import CATALOG, ERROR, RunOptions, list_checks, run_scenario
from .groebner import DEFAULT_SPAIR_BUDGET

ENV_PREFIX = "RIBETKIT_"


class ScenarioError(ValueError):
    """The scenario file could not be parsed or does not match the schema."""


def scenario_schema() -> dict:
    return json.loads(resources.files("ribetkit").joinpath("scenarios/schema.json").read_text())


def bundled_scenarios() -> list[str]:
    root = resources.files("ribetkit").joinpath("scenarios")
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json") and p.name != "schema.json")


def resolve_scenario_path(path: str) -> Path:
    """Plain paths are used as given; a bare bundled name such as ``example_r2.json`` also resolves."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("ribetkit").joinpath("scenarios", p.name)
    if p.parent == Path(".") and bundled.is_file():
        return Path(str(bundled))
    return p


def load_scenario(path: str) -> dict:
    p = resolve_scenario_path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(scenario_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{path}: schema violation at /{'/'.join(map(str, e.absolute_path))}: {e.message}"
                 for e in errors[:5]]
        raise ScenarioError("\n".join(lines))
    return data


def _env(name: str) -> Optional[str]:
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))


def _parse_primes(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ribetkit", description="Scenario-driven checks for Ribet-type lemmas.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one or more scenario files")
    run.add_argument("--scenario", action="append", help="scenario JSON path or bundled name (repeatable)")
    run.add_argument("--out", help="write the JSON report here (a list when several scenarios run)")
    run.add_argument("--seed", type=int)
    run.add_argument("--budget-spairs", type=int)
    run.add_argument("--degree-bound", type=int)
    run.add_argument("--precision", type=int)
    run.add_argument("--primes", type=_parse_primes)
    run.add_argument("--check", help="run only this check id")
    run.add_argument("--jobs", type=int, help="worker processes for scenario batches")
    run.add_argument("--quiet", action="store_true", help="suppress per-check lines")
    sub.add_parser("list-checks", help="print the check catalog")
    sub.add_parser("list-scenarios", help="print the bundled scenario names")
    return parser


def _resolve(args) -> tuple[list[str], RunOptions, Optional[str], int]:
    def pick(name, conv=str):
        v = getattr(args, name.replace("-", "_"))
        if v is None and _env(name) is not None:
            v = conv(_env(name))
        return v

    scenarios = args.scenario or ([s for s in _env("scenario").split(os.pathsep) if s] if _env("scenario") else [])
    opts = RunOptions(
        seed=pick("seed", int) or 0,
        budget_spairs=pick("budget-spairs", int) or DEFAULT_SPAIR_BUDGET,
        degree_bound=pick("degree-bound", int),
        precision=pick("precision", int),
        primes=pick("primes", _parse_primes),
        check=pick("check"),
    )
    return scenarios, opts, pick("out"), pick("jobs", int) or 1


def _run_one(path: str, opts: RunOptions) -> dict:
    scenario = load_scenario(path)
    if opts.check is not None and opts.check not in CATALOG:
        raise ScenarioError(f"unknown check id {opts.check!r}")
    return run_scenario(scenario, opts)


def _error_report(path: str, message: str) -> dict:
    return {"report_version": "1.0", "scenario": {"path": path}, "checks": [], "exit_code": 1,
            "error": message, "summary": {ERROR: 1}, "timings": {}}


def _run_safe(path: str, opts: RunOptions) -> dict:
    try:
        return _run_one(path, opts)
    except (ScenarioError, KeyError) as exc:
        return _error_report(path, str(exc.args[0]) if exc.args else repr(exc))


def _print_report(path: str, report: dict, quiet: bool, out=None) -> None:
    out = out or sys.stdout
    if "error" in report:
        print(f"[error] {path}", file=out)
        for line in report["error"].splitlines():
            print(f"    {line}", file=out)
        return
    name = report["scenario"].get("name", path)
    summary = ", ".join(f"{v} {k}" for k, v in report["summary"].items() if v)
    print(f"== {name} ({report['scenario']['kind']}): exit {report['exit_code']} [{summary}]", file=out)
    if quiet:
        return
    for c in report["checks"]:
        t = report["timings"].get(c["id"], 0.0)
        print(f"  {c['status']:<20} {c['id']:<36} {t:8.3f}s  {c['anchor']}", file=out)
        if c["status"] not in ("pass",) and "message" in c["details"]:
            print(f"      {c['details']['message']}", file=out)


def cmd_run(args) -> int:
    scenarios, opts, out, jobs = _resolve(args)
    if not scenarios:
        print("ribetkit run: no scenario given (use --scenario PATH)", file=sys.stderr)
        return 1
    if jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_safe, scenarios, [opts] * len(scenarios)))
    else:
        reports = [_run_safe(s, opts) for s in scenarios]
    for path, rep in zip(scenarios, reports):
        _print_report(path, rep, args.quiet)
    if out:
        payload = reports[0] if len(reports) == 1 else reports
        Path(out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    codes = [r["exit_code"] for r in reports]
    if 1 in codes:
        return 1
    return 2 if 2 in codes else 0


def cmd_list_checks() -> int:
    for c in list_checks():
        print(f"{c.id:<38} {','.join(c.kinds):<28} {c.anchor}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-checks":
        return cmd_list_checks()
    if args.command == "list-scenarios":
        for name in bundled_scenarios():
            print(name)
        return 0
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
