"""Run configuration: flags override the config file, which overrides defaults.

The config file is flat ``key=value`` text (``#`` starts a comment) and is
located through the ``SELFAFFINE_CONFIG`` environment variable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping, Optional

ENV_CONFIG = "SELFAFFINE_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    depth: int = 12
    point_budget: int = 10**6
    raster_size: int = 512
    jobs: int = 1
    output_dir: str = "."

    def __post_init__(self):
        for name in ("depth", "point_budget", "raster_size", "jobs"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        out = Path(self.output_dir)
        if out.exists() and not out.is_dir():
            raise ConfigError(f"output_dir {self.output_dir!r} is not a directory")


_KEYS = {f.name: f.type for f in fields(RunConfig)}


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown or malformed entry {raw!r}")
        if key == "output_dir":
            values[key] = value
        else:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be an integer") from None
    return values


def load_config(overrides: Optional[Mapping] = None, env: Optional[Mapping] = None) -> RunConfig:
    env = os.environ if env is None else env
    cfg = RunConfig()
    path = env.get(ENV_CONFIG)
    if path:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from None
        cfg = replace(cfg, **parse_config_text(text))
    flags = {k: v for k, v in (overrides or {}).items() if v is not None and k in _KEYS}
    return replace(cfg, **flags)
