"""Command line: ``steinhaus run | verify | sweep``.

Exit codes: 0 all verdicts as expected, 1 verification failure, 2 bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError
from .experiments import load_config, run_batch, run_config, verify_report


def _cmd_run(args) -> int:
    config = load_config(args.config)
    out = Path(args.out) if args.out else Path("out") / config.get("name", Path(args.config).stem)
    report, code = run_config(config, out, base_dir=Path(args.config).parent)
    status = "ok" if code == 0 else "FAILED"
    print(f"{report['name']}: {status} {json.dumps(report['verdicts'], sort_keys=True)} -> {out / 'report.json'}")
    for err in report["errors"]:
        print(f"  error: {err['type']}: {err['message']}", file=sys.stderr)
    for key, mm in report.get("mismatches", {}).items():
        print(f"  expected {key}={mm['expected']!r}, got {mm['got']!r}", file=sys.stderr)
    return code


def _cmd_verify(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read report {args.report}: {exc}") from None
    ok, problems = verify_report(report)
    print(f"{report.get('name', args.report)}: {'verified' if ok else 'FAILED'}")
    for p in problems:
        print(f"  {p}", file=sys.stderr)
    return 0 if ok else 1


def _cmd_sweep(args) -> int:
    rows, code = run_batch(args.batch, args.out)
    for name, kind, c in rows:
        print(f"{name:32s} {kind:16s} {'ok' if c == 0 else 'FAILED'}")
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steinhaus", description="Certify or refute interior points of boundary-patch sumsets.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (default: out/<name>)")
    p.set_defaults(func=_cmd_run)
    p = sub.add_parser("verify", help="re-verify a report.json")
    p.add_argument("report")
    p.set_defaults(func=_cmd_verify)
    p = sub.add_parser("sweep", help="run every config listed in a batch file")
    p.add_argument("batch")
    p.add_argument("--out", help="output root (default: the batch's 'out' entry)")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
