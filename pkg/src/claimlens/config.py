"""Versioned key-value config files and the data-directory convention.

Format:

    #claimlens-config-v1
    key = value

CLAIMLENS_DATA_DIR overrides any configured data root.
"""

from __future__ import annotations

import os
from pathlib import Path

from . import CONFIG_HEADER

ENV_DATA_DIR = "CLAIMLENS_DATA_DIR"
DEFAULT_DATA_DIR = "claimlens-data"


class ConfigError(ValueError):
    pass


def load_config(path: str | Path) -> dict[str, str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != CONFIG_HEADER:
        raise ConfigError(f"{path}: expected header {CONFIG_HEADER!r}")
    out: dict[str, str] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}: line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    return out


def save_config(path: str | Path, values: dict[str, str]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "".join(f"{k} = {v}\n" for k, v in values.items())
    path.write_text(CONFIG_HEADER + "\n" + body, encoding="utf-8")


def data_dir(config: dict[str, str] | None = None) -> Path:
    env = os.environ.get(ENV_DATA_DIR)
    if env:
        return Path(env)
    if config and "data_dir" in config:
        return Path(config["data_dir"])
    return Path(DEFAULT_DATA_DIR)
