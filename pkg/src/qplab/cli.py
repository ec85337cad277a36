"""Command line: qplab <task> --config file.json [--jobs N] [--out prefix] [--no-cache]."""

from __future__ import annotations

import argparse
import sys

from .config import TASKS, RunConfig
from .errors import ConfigError, TaskError

EXIT_OK, EXIT_CONFIG, EXIT_TASK, EXIT_PARTIAL = 0, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qplab", description="Quasiperiodic Schrodinger operator lab.")
    ap.add_argument("task", choices=TASKS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps")
    ap.add_argument("--out", default=None, help="output prefix (default: config 'out' or the task name)")
    ap.add_argument("--no-cache", action="store_true", help="neither read nor write the result cache")
    ap.add_argument("--no-svg", action="store_true", help="skip the SVG plot")
    return ap


def main(argv=None) -> int:
    from .runner import run

    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config, args.task)
        if args.jobs is not None:
            if args.jobs < 1:
                raise ConfigError("--jobs: expected a positive integer")
            cfg.jobs = args.jobs
        env = run(cfg, use_cache=not args.no_cache, out=args.out or cfg.out or args.task, svg=not args.no_svg)
    except ConfigError as exc:
        print(f"qplab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TaskError as exc:
        print(f"qplab: task error: {exc}", file=sys.stderr)
        return EXIT_TASK
    status = "cache hit" if env.cache_hit else "computed"
    verdict = "all checks passed" if env.passed else "some checks failed"
    print(f"qplab: {env.task} {status} in {env.wall_time:.2f} s; {len(env.result.rows)} rows; {verdict}",
          file=sys.stderr)
    for c in env.result.checks:
        print(f"  {'PASS' if c['passed'] else 'FAIL'} {c['name']}", file=sys.stderr)
    for e in env.errors:
        print(f"  error: {e}", file=sys.stderr)
    for f in env.files.values():
        print(f"  wrote {f}", file=sys.stderr)
    return EXIT_PARTIAL if env.errors else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
