"""Plain-text key-value configuration files.

One ``key = value`` pair per line, ``#`` comments and blank lines
ignored. Keys mirror CLI flag names with dashes or underscores; CLI
arguments override file values.
"""

from __future__ import annotations

from pathlib import Path


class ConfigError(ValueError):
    """A config file line could not be parsed."""


def parse_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not key:
                raise ConfigError(f"{path}:{lineno}: empty key")
            values[key] = value.strip()
    return values


def merge_settings(file_values: dict[str, str], cli_values: dict) -> dict:
    """File values first, CLI overrides (None CLI values are 'unset')."""
    merged: dict = dict(file_values)
    for key, value in cli_values.items():
        if value is not None:
            merged[key] = value
    return merged
