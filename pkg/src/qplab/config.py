"""Run configuration: validation, defaults and canonical hashing."""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

TOP_KEYS = ("task", "potential", "alpha", "alpha_depth", "params", "jobs", "cache_dir", "out")

# None means "required or computed"; grids accept a number, a list,
# {"linspace": [a, b, n]} or {"arange": [a, b, step]}
TASK_DEFAULTS = {
    "freq": {"depth": 30},
    "lyap": {"E": 0.0, "eps": 0.0, "N": 200_000, "segments": 8},
    "accel": {"E": 0.0, "N": 200_000, "n_eps": 17, "eps_max": None, "tol": 0.15},
    "classify": {"E": 0.0, "N": 200_000, "eps_max": None},
    "ids": {"E": 0.0, "size": 2000, "theta_samples": 8, "rotation_check": False, "N_rot": 1_000_000,
            "tol": 1e-2},
    "holder": {"E_range": [-4.8, 4.8], "resolution": 1e-4, "size": 4000, "theta_samples": 8,
               "labels": [-1, 1, 2], "scale_min": 2.0**-12, "scale_max": 2.0**-3,
               "exponent_range": [0.4, 0.6], "min_r2": 0.9},
    "localize": {"theta": 0.0, "E_window": [-10.0, 10.0], "sizes": [2000]},
    "dual-spectrum": {"E": 0.0, "eps": 0.0, "N": 1_000_000, "segments": 8},
    "jensen": {"E": 0.0, "eps": {"linspace": [0.0, 0.3, 31]}, "N": 200_000, "segments": 8},
    "haro-puig": {"E": 0.0, "N": 400_000, "segments": 8, "tol": 3e-2},
    "dominated": {"E": 0.0, "k": None, "horizon": 4000, "theta_samples": 64, "margin": 0.01},
    "center": {"E": None, "ids_target": None, "ids_size": 2000, "grid_size": 2048, "horizon": None,
               "eps": [], "N_inv": 400_000},
    "rotation": {"E": None, "ids_target": None, "ids_size": 2000, "theta_samples": 8,
                 "grid_size": 1024, "rot_N": 200_000},
    "duality-check": {"E": None, "ids_target": None, "ids_size": 2000, "theta_samples": 8,
                      "grid_size": 1024, "rot_N": 200_000, "classify_N": 100_000,
                      "tol": 1e-2, "step_tol": 1e-3},
    "truncation-study": {"E": None, "ids_target": 0.85, "ids_size": 2000, "n_range": [2, 8],
                         "grid_size": 512, "classify_N": 100_000, "min_r2": 0.9},
    "bloch": {"E": None, "ids_target": None, "ids_size": 2000, "grid_size": 2048, "budget": 64,
              "tau": 2.0, "gamma": 1e-4, "half": 2000, "strict": False},
    "sweep": {"task": None, "axis": None, "values": None, "params": {}},
}

TASKS = tuple(TASK_DEFAULTS)


def grid(value, name: str = "grid") -> np.ndarray:
    """1-d float array from a grid specification."""
    if isinstance(value, dict):
        if len(value) != 1:
            raise ConfigError(f"{name}: expected exactly one of 'linspace' or 'arange'")
        (kind, args), = value.items()
        try:
            if kind == "linspace":
                a, b, n = args
                return np.linspace(float(a), float(b), int(n))
            if kind == "arange":
                a, b, step = args
                return np.arange(float(a), float(b), float(step))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{name}.{kind}: {exc}") from exc
        raise ConfigError(f"{name}: unknown grid kind {kind!r}")
    try:
        out = np.atleast_1d(np.asarray(value, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    if out.ndim != 1 or out.size == 0:
        raise ConfigError(f"{name}: expected a non-empty flat list")
    if not np.all(np.isfinite(out)):
        raise ConfigError(f"{name}: non-finite value")
    return out


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


@dataclass
class RunConfig:
    task: str
    potential: dict = field(default_factory=lambda: {"type": "amo", "lambda": 2.0})
    alpha: object = "golden"
    alpha_depth: int = 30
    params: dict = field(default_factory=dict)
    jobs: int = 1
    cache_dir: str | None = None
    out: str | None = None

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_dict(cls, data: dict, task: str | None = None) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
        extra = set(data) - set(TOP_KEYS)
        if extra:
            raise ConfigError(f"config: unknown key(s) {sorted(extra)}")
        data = copy.deepcopy(data)
        if task is not None:
            if "task" in data and data["task"] != task:
                raise ConfigError(f"task: config says {data['task']!r} but {task!r} was requested")
            data["task"] = task
        if "task" not in data:
            raise ConfigError("task: missing")
        return cls(**data)

    @classmethod
    def load(cls, path, task: str | None = None) -> "RunConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from exc
        return cls.from_dict(data, task)

    def to_dict(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in TOP_KEYS}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def validate(self):
        if self.task not in TASK_DEFAULTS:
            raise ConfigError(f"task: unknown task {self.task!r}")
        if not isinstance(self.potential, dict):
            raise ConfigError("potential: expected an object")
        if not isinstance(self.alpha, (str, int, float)) or isinstance(self.alpha, bool):
            raise ConfigError("alpha: expected a number or a frequency token")
        if not isinstance(self.alpha_depth, int) or self.alpha_depth < 1:
            raise ConfigError("alpha_depth: expected a positive integer")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError("jobs: expected a positive integer")
        if not isinstance(self.params, dict):
            raise ConfigError("params: expected an object")
        for key in ("cache_dir", "out"):
            if getattr(self, key) is not None and not isinstance(getattr(self, key), str):
                raise ConfigError(f"{key}: expected a string")
        self.resolved_params()
        if self.task == "sweep":
            self.sweep_points()

    def resolved_params(self) -> dict:
        """Task parameters with defaults filled in."""
        return resolve_params(self.task, self.params)

    def sweep_points(self) -> list["RunConfig"]:
        """One inner configuration per value of the sweep axis."""
        p = self.resolved_params()
        inner = p["task"]
        if inner not in TASK_DEFAULTS or inner == "sweep":
            raise ConfigError(f"params.task: {inner!r} cannot be swept")
        if not isinstance(p["axis"], str) or p["axis"] not in TASK_DEFAULTS[inner]:
            raise ConfigError(f"params.axis: {p['axis']!r} is not a parameter of {inner}")
        if p["values"] is None:
            raise ConfigError("params.values: missing")
        values = p["values"]
        if not isinstance(values, list) or not values:
            values = [float(x) for x in grid(values, "params.values")]
        out = []
        for x in values:
            sub = dict(p["params"])
            sub[p["axis"]] = x
            out.append(RunConfig(inner, self.potential, self.alpha, self.alpha_depth, sub, 1,
                                 self.cache_dir, None))
        return out

    def identity(self) -> dict:
        """Everything that determines the numerical result."""
        from . import __version__

        return {
            "task": self.task,
            "potential": self.potential,
            "alpha": self.alpha,
            "alpha_depth": self.alpha_depth,
            "params": _jsonable(self.resolved_params()),
            "version": __version__,
        }

    def config_hash(self) -> str:
        return content_hash(self.identity())

    def inputs_hash(self) -> str:
        return content_hash({"potential": self.potential, "alpha": self.alpha,
                             "alpha_depth": self.alpha_depth})


def resolve_params(task: str, params: dict) -> dict:
    defaults = TASK_DEFAULTS[task]
    extra = set(params) - set(defaults)
    if extra:
        raise ConfigError(f"params: unknown key(s) {sorted(extra)} for task {task}")
    out = copy.deepcopy(defaults)
    out.update(copy.deepcopy(params))
    return out


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x
