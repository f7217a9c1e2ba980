"""Flat key = value config files and override handling.

The format is deliberately plain: one ``key = value`` per line, ``#`` starts
a comment, keys mirror ExperimentConfig field names.  Overrides (from CLI
flags) use the same value syntax and win over file values.
"""

from __future__ import annotations

import math
from dataclasses import fields

from .errors import ConfigError, InvariantViolationError
from .experiments import ExperimentConfig

_INT_KEYS = {"eta", "trials", "n_test", "master_seed", "n_anchors", "eta_full",
             "spectrum_length"}
_FLOAT_KEYS = {"a", "sigma", "bandwidth", "interval_lo", "interval_hi"}
_STR_KEYS = {"experiment", "spectrum", "law", "kernel", "input_domain", "out"}
_BOOL_KEYS = {"anchors_in_training"}
_INT_LIST_KEYS = {"n_grid", "truncation_etas"}

CONFIG_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _BOOL_KEYS | _INT_LIST_KEYS

_FIELD_ORDER = [f.name for f in fields(ExperimentConfig)]


def _parse_value(key: str, raw: str, where: str):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            v = float(raw)
            if math.isnan(v):
                raise ValueError("nan")
            return v
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if key in _INT_LIST_KEYS:
            parts = [p for p in raw.replace(",", " ").split() if p]
            if not parts:
                raise ValueError("empty list")
            return tuple(int(p) for p in parts)
        return raw
    except ValueError as exc:
        raise ConfigError(f"{where}: malformed value for key '{key}': {raw!r}") from exc


def parse_config(text: str = "", overrides: dict | None = None) -> ExperimentConfig:
    """Build a validated ExperimentConfig from file text plus overrides.

    Errors name the offending key and line.  This layer also enforces the
    over-parameterization requirement eta >= 2.
    """
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        values[key] = _parse_value(key, raw, f"line {lineno}")
    for key, raw in (overrides or {}).items():
        key = key.strip().replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"override: unknown key '{key}'")
        if isinstance(raw, str):
            values[key] = _parse_value(key, raw, f"override --{key}")
        else:
            values[key] = raw
    try:
        cfg = ExperimentConfig(**values)
    except InvariantViolationError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.eta < 2:
        raise ConfigError(
            f"key 'eta': over-parameterization needs eta >= 2, got {cfg.eta}"
        )
    return cfg


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render a config as parseable text; parse_config round-trips it."""
    lines = []
    for name in _FIELD_ORDER:
        v = getattr(cfg, name)
        if name in _INT_LIST_KEYS:
            rendered = ",".join(str(x) for x in v)
        elif name in _BOOL_KEYS:
            rendered = "true" if v else "false"
        elif isinstance(v, float):
            rendered = repr(v)
        else:
            rendered = str(v)
        lines.append(f"{name} = {rendered}")
    return "\n".join(lines) + "\n"
