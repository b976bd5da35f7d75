"""Command line driver.

    psdecay run <config> [--out DIR] [--seed N]
    psdecay validate <config>
    psdecay version

Exit codes: 0 success, 1 invalid configuration, 2 run aborted (NaN guard,
wrap-around budget or another numerical error), 3 I/O failure.  Failing
checks do not change the exit code; they are listed in summary.txt.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .config import parse_config, serialize
from .errors import ConfigError, PSDecayError
from .scenarios import ScenarioResult, run_scenario, write_report

EXIT_OK, EXIT_CONFIG, EXIT_ABORT, EXIT_IO = 0, 1, 2, 3


def _load(path: str):
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="psdecay", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the scenario described by a config file")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides [scenario] output)")
    run.add_argument("--seed", type=int, help="random seed (overrides [scenario] seed)")
    val = sub.add_parser("validate", help="parse a config and print its canonical form")
    val.add_argument("config")
    sub.add_parser("version", help="print the package version")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "version":
        print(f"psdecay {__version__}")
        return EXIT_OK
    try:
        cfg = _load(args.config)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.command == "validate":
        sys.stdout.write(serialize(cfg))
        return EXIT_OK

    out = Path(args.out if args.out else cfg.get("scenario", "output"))
    try:
        result = run_scenario(cfg, args.seed)
        code = EXIT_ABORT if result.aborted else EXIT_OK
    except (PSDecayError, ValueError, ArithmeticError) as exc:
        result = ScenarioResult(cfg.name, seed=cfg.get("scenario", "seed") if args.seed is None else args.seed,
                                aborted=f"{type(exc).__name__}: {exc}")
        code = EXIT_ABORT
    try:
        write_report([result], out)
    except OSError as exc:
        print(f"cannot write report to {out}: {exc}", file=sys.stderr)
        return EXIT_IO
    if result.aborted:
        print(f"aborted: {result.aborted}", file=sys.stderr)
    print(f"{cfg.name}: {len(result.checks)} checks, {result.failed} failed; report in {out}")
    return code


if __name__ == "__main__":
    sys.exit(main())
