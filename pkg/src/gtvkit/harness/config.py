"""Flat ``key = value`` run configuration files.

One key per line; ``#`` starts a comment; blank lines are ignored.  Keys
use the long CLI flag names with dashes or underscores, e.g.::

    experiment = psystem
    nx = 4000
    eps = 0.05, 0.075, 0.1125
"""

from __future__ import annotations

from pathlib import Path


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        out[key.replace("-", "_").lower()] = value
    return out


def load_config(path: str | Path) -> dict[str, str]:
    return parse_config_text(Path(path).read_text())


def parse_eps_list(value: str) -> tuple[float, ...]:
    """Comma- or whitespace-separated list of floats."""
    parts = value.replace(",", " ").split()
    if not parts:
        raise ValueError("empty epsilon list")
    return tuple(float(p) for p in parts)
