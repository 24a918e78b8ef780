"""Command-line entry point: one subcommand per experiment kind, plus ``suite``.

Exit status: 0 pass, 1 tolerance breach, 2 config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import KINDS, PROFILES, default_config, load_config, validate
from .errors import ConfigError, LbmError

log = logging.getLogger("lbmbsn")

EXIT_PASS, EXIT_BREACH, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML experiment config (defaults to the built-in preset)")
    p.add_argument("--seed", type=int, help="base seed, overrides the config")
    p.add_argument("--out", help="output directory, overrides the config")
    p.add_argument("--threads", type=int, help="worker processes (default: $LBMBSN_THREADS or 1)")
    p.add_argument("--tolerance-profile", choices=sorted(PROFILES), default=None,
                   help="strict (default) or smoke: 10x shorter runs, sqrt(10) wider gates")
    p.add_argument("-q", "--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lbmbsn", description="Low-barrier-magnet neuron experiments.")
    sub = ap.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        _common(sub.add_parser(kind, help=f"run the {kind} experiment"))
    suite = sub.add_parser("suite", help="run every experiment kind with its preset config")
    _common(suite)
    return ap


def _report(manifest, out, quiet: bool) -> None:
    if quiet:
        return
    for q in manifest.quantities:
        if q["check"] == "info":
            continue
        flag = "ok  " if q["passed"] else ("FAIL" if q["gated"] else "note")
        print(f"  [{flag}] {q['name']}: {q['measured']:.4g}"
              + (f" (analytic {q['analytic']:.4g}, dev {q['relative_deviation']:+.1%})"
                 if q["analytic"] is not None else ""))
    for f in manifest.failures:
        print(f"  [ERR ] {f['point']}: {f['error']}: {f['message']}")
    print(f"{manifest.kind}: {manifest.to_dict()['status']} -> {out / 'manifest.json'}")


def run_one(kind: str, args, out: str | None = None) -> int:
    from .experiments import run

    try:
        raw = load_config(args.config) if args.config else default_config(kind)
        if raw.get("kind", kind) != kind:
            raise ConfigError(f"config kind {raw.get('kind')!r} does not match subcommand {kind!r}",
                              path="kind")
        raw["kind"] = kind
        spec = validate(raw, profile=args.tolerance_profile, seed=args.seed, output_dir=out or args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest = run(spec, threads=args.threads)
    except LbmError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _report(manifest, Path(spec.output_dir), args.quiet)
    return manifest.exit_code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING)
    if args.kind != "suite":
        return run_one(args.kind, args)
    if args.config:
        print("config error: suite runs the preset configs; --config is not accepted", file=sys.stderr)
        return EXIT_CONFIG
    base = Path(args.out or "runs")
    codes = [run_one(kind, args, out=str(base / kind)) for kind in KINDS]
    # config and runtime errors outrank breaches
    for code in (EXIT_CONFIG, EXIT_RUNTIME, EXIT_BREACH):
        if code in codes:
            return code
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
