"""run and sweep: dispatch, caching, deterministic merge and file emission."""

from __future__ import annotations

import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .cache import Cache, resolve_dir
from .config import RunConfig
from .errors import ConfigError, QPLabError, TaskError
from .output import TaskResult, svg_polyline, to_json
from .tasks import HANDLERS, Context


@dataclass
class ResultEnvelope:
    """Outcome of a run.

    ``document`` is what goes into ``<prefix>.json``; the wall time is kept
    out of it so identical configs give byte-identical files.
    """

    task: str
    config_hash: str
    inputs_hash: str
    result: TaskResult
    wall_time: float
    cache_hit: bool = False
    errors: list = field(default_factory=list)
    files: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.result.checks)

    def document(self, identity: dict) -> dict:
        doc = {
            "task": self.task,
            "tool_version": __version__,
            "config_hash": self.config_hash,
            "inputs_hash": self.inputs_hash,
            "config": identity,
            "rows": len(self.result.rows),
            "summary": self.result.summary,
            "checks": self.result.checks,
        }
        if self.errors:
            doc["errors"] = self.errors
        if "csv" in self.files:
            doc["csv"] = Path(self.files["csv"]).name
        return doc


def make_cache(cfg: RunConfig, use_cache: bool = True) -> Cache:
    if not use_cache:
        return Cache(None, enabled=False)
    return Cache(resolve_dir(cfg.cache_dir))


def compute(cfg: RunConfig, cache: Cache) -> tuple[TaskResult, bool]:
    """Result of a single (non-sweep) task, from the cache when possible."""
    key = cfg.identity()
    hit = cache.get("result", key)
    if hit is not None:
        return hit, True
    ctx = Context.build(cfg, cache)
    try:
        res = HANDLERS[cfg.task](ctx)
    except ConfigError:
        raise
    except (QPLabError, ValueError, ArithmeticError, NotImplementedError) as exc:
        raise TaskError(f"{type(exc).__name__}: {exc}") from exc
    cache.put("result", key, res)
    return res, False


def _point(args):
    data, root, enabled = args
    cfg = RunConfig.from_dict(data)
    cache = Cache(root, enabled) if enabled else Cache(None, enabled=False)
    try:
        res, _ = compute(cfg, cache)
        return "ok", res
    except QPLabError as exc:
        return "error", f"{type(exc).__name__}: {exc}"


def sweep(cfg: RunConfig, cache: Cache, jobs: int | None = None, progress=sys.stderr) -> tuple[TaskResult, list]:
    """Map the inner task over the sweep axis and merge in axis order.

    Failed points are recorded with their error strings and the sweep goes on.
    """
    p = cfg.resolved_params()
    points = cfg.sweep_points()
    axis = p["axis"]
    jobs = cfg.jobs if jobs is None else jobs
    root = str(cache.root) if cache.enabled else None
    args = [(pt.to_dict(), root, cache.enabled) for pt in points]
    out = [None] * len(points)
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(min(jobs, len(points))) as pool:
            futs = {pool.submit(_point, a): i for i, a in enumerate(args)}
            for done, f in enumerate(as_completed(futs), 1):
                out[futs[f]] = f.result()
                _progress(progress, done, len(points))
    else:
        for i, a in enumerate(args):
            out[i] = _point(a)
            _progress(progress, i + 1, len(points))
    columns, rows, errors, summaries, checks = None, [], [], [], []
    xs, ys = [], []
    for pt, (status, val) in zip(points, out):
        x = pt.params[axis]
        if status == "error":
            errors.append({axis: x, "error": val})
            continue
        if columns is None:
            columns = [f"sweep_{axis}"] + list(val.columns)
        rows.extend([[x] + list(r) for r in val.rows])
        summaries.append({axis: x, "summary": val.summary})
        checks.extend(dict(c, name=f"{c['name']}@{axis}={x}") for c in val.checks)
        if val.curve is not None:
            xs.extend(val.curve[2])
            ys.extend(val.curve[3])
            xl, yl = val.curve[0], val.curve[1]
    summary = {"inner_task": p["task"], "axis": axis, "points": len(points), "failed": len(errors),
               "per_point": summaries}
    curve = (xl, yl, xs, ys) if xs else None
    return TaskResult(columns or [f"sweep_{axis}"], rows, summary, curve, checks), errors


def _progress(stream, done, total):
    if stream is not None:
        print(f"[qplab] {done}/{total}", file=stream, flush=True)


def run(cfg: RunConfig, use_cache: bool = True, out: str | None = None, jobs: int | None = None,
        svg: bool = True) -> ResultEnvelope:
    """Execute ``cfg`` and write ``<prefix>.csv``, ``<prefix>.json`` and ``<prefix>.svg``."""
    t0 = time.perf_counter()
    cache = make_cache(cfg, use_cache)
    errors = []
    if cfg.task == "sweep":
        res, errors = sweep(cfg, cache, jobs)
        hit = False
    else:
        res, hit = compute(cfg, cache)
    env = ResultEnvelope(cfg.task, cfg.config_hash(), cfg.inputs_hash(), res, time.perf_counter() - t0, hit, errors)
    prefix = out or cfg.out
    if prefix:
        write(env, cfg, prefix, svg)
    return env


def write(env: ResultEnvelope, cfg: RunConfig, prefix: str, svg: bool = True) -> dict:
    base = Path(prefix)
    if base.parent and not base.parent.exists():
        base.parent.mkdir(parents=True, exist_ok=True)
    files = {"csv": str(base) + ".csv", "json": str(base) + ".json"}
    Path(files["csv"]).write_text(env.result.csv_text())
    env.files = files
    if svg and env.result.curve is not None:
        xl, yl, x, y = env.result.curve
        files["svg"] = str(base) + ".svg"
        Path(files["svg"]).write_text(svg_polyline(x, y, xl, yl))
    Path(files["json"]).write_text(to_json(env.document(cfg.identity())) + "\n")
    return files
