"""Content-addressed on-disk cache of task results and center frames."""

from __future__ import annotations

import os
import pickle
import tempfile
from pathlib import Path

from .config import content_hash
from .errors import ConfigError

ENV = "QPLAB_CACHE"


def default_dir() -> Path:
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "qplab"


def resolve_dir(cache_dir: str | None) -> Path:
    """QPLAB_CACHE beats the config value, which beats the default."""
    env = os.environ.get(ENV)
    if env:
        return Path(env)
    return Path(cache_dir) if cache_dir else default_dir()


class Cache:
    """Pickle store keyed by the SHA-256 of a canonical JSON description.

    Pickle keeps floats and arrays bit for bit, so a hit returns exactly
    what the fresh computation produced. A disabled cache computes every time.
    """

    def __init__(self, root: Path | str | None, enabled: bool = True):
        self.enabled = enabled and root is not None
        self.root = Path(root) if root is not None else None
        self.hits = 0
        self.misses = 0
        if self.enabled:
            try:
                self.root.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise ConfigError(f"cache_dir: cannot create {self.root}: {exc}") from exc
            if not os.access(self.root, os.W_OK):
                raise ConfigError(f"cache_dir: {self.root} is not writable")

    def path(self, kind: str, key: dict) -> Path:
        return self.root / kind / f"{content_hash(key)}.pkl"

    def get(self, kind: str, key: dict):
        if not self.enabled:
            return None
        p = self.path(kind, key)
        try:
            with open(p, "rb") as fh:
                value = pickle.load(fh)
        except (OSError, pickle.UnpicklingError, EOFError):
            return None
        self.hits += 1
        return value

    def put(self, kind: str, key: dict, value) -> None:
        if not self.enabled:
            return
        p = self.path(kind, key)
        p.parent.mkdir(parents=True, exist_ok=True)
        # write then rename so concurrent workers never see a partial file
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            pickle.dump(value, fh, protocol=pickle.HIGHEST_PROTOCOL)
        os.replace(tmp, p)

    def memo(self, kind: str, key: dict, compute):
        hit = self.get(kind, key)
        if hit is not None:
            return hit
        self.misses += 1
        value = compute()
        self.put(kind, key, value)
        return value
