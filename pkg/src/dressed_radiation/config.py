"""
Flat ``key = value`` run configuration with command-line overrides.

A config file holds one assignment per line; ``#`` starts a comment. Keys
given on the command line as ``key=value`` replace file values. Each value
remembers where it came from so errors can point at a file line.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .dressed import SystemConfig

__all__ = ["ConfigError", "RunConfig", "parse_config_text", "load_config", "parse_alpha_grid", "system_from_config"]

_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_GRID = re.compile(r"^\s*([^:]+):([^:]+):(\d+)\s*(log|lin)\s*$")


class ConfigError(ValueError):
    """Malformed or out-of-domain configuration."""


@dataclass
class RunConfig:
    """Raw string values plus their origins, with typed accessors.

    Accessors record which keys were read; ``check_unused`` then rejects
    anything left over, so typos fail before computation starts.
    """

    values: dict[str, str] = field(default_factory=dict)
    origins: dict[str, str] = field(default_factory=dict)
    _used: set = field(default_factory=set, repr=False)

    def __contains__(self, key: str) -> bool:
        return key in self.values

    def _where(self, key: str) -> str:
        return f"{self.origins.get(key, '<default>')}: key '{key}'"

    def raw(self, key: str, default: str | None = None) -> str | None:
        self._used.add(key)
        return self.values.get(key, default)

    def get_float(self, key: str, default: float | None = None, *, minimum: float | None = None,
                  exclusive_min: bool = False, allow_inf: bool = False) -> float | None:
        text = self.raw(key)
        if text is None:
            return default
        try:
            value = float(text)
        except ValueError:
            raise ConfigError(f"{self._where(key)}: expected a number, got {text!r}") from None
        if math.isnan(value) or (math.isinf(value) and not allow_inf):
            raise ConfigError(f"{self._where(key)}: value must be finite, got {text!r}")
        if minimum is not None:
            bad = value <= minimum if exclusive_min else value < minimum
            if bad:
                op = ">" if exclusive_min else ">="
                raise ConfigError(f"{self._where(key)}: must be {op} {minimum}, got {text!r}")
        return value

    def get_int(self, key: str, default: int | None = None, *, minimum: int | None = None) -> int | None:
        text = self.raw(key)
        if text is None:
            return default
        try:
            value = int(text)
        except ValueError:
            raise ConfigError(f"{self._where(key)}: expected an integer, got {text!r}") from None
        if minimum is not None and value < minimum:
            raise ConfigError(f"{self._where(key)}: must be >= {minimum}, got {value}")
        return value

    def get_choice(self, key: str, choices: Iterable[str], default: str | None = None) -> str | None:
        text = self.raw(key)
        if text is None:
            return default
        choices = tuple(choices)
        if text not in choices:
            raise ConfigError(f"{self._where(key)}: expected one of {', '.join(choices)}, got {text!r}")
        return text

    def get_int_list(self, key: str, default: Iterable[int] | None = None, *, minimum: int = 1) -> list[int] | None:
        text = self.raw(key)
        if text is None:
            return None if default is None else list(default)
        try:
            values = [int(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"{self._where(key)}: expected comma-separated integers, got {text!r}") from None
        if not values or min(values) < minimum:
            raise ConfigError(f"{self._where(key)}: entries must be >= {minimum}")
        return values

    def get_float_list(self, key: str, default: Iterable[float] | None = None) -> list[float] | None:
        text = self.raw(key)
        if text is None:
            return None if default is None else list(default)
        try:
            values = [float(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"{self._where(key)}: expected comma-separated numbers, got {text!r}") from None
        if not values or not all(math.isfinite(v) for v in values):
            raise ConfigError(f"{self._where(key)}: expected finite numbers")
        return values

    def check_unused(self) -> None:
        extra = sorted(set(self.values) - self._used)
        if extra:
            details = "; ".join(f"{self.origins[k]}: unknown key '{k}'" for k in extra)
            raise ConfigError(details)


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    """Parse ``key = value`` lines. Duplicate keys are an error."""
    cfg = RunConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(f"{source}:{lineno}: invalid key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: key '{key}' has no value")
        if key in cfg.values:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}' (first at {cfg.origins[key]})")
        cfg.values[key] = value
        cfg.origins[key] = f"{source}:{lineno}"
    return cfg


def load_config(path: str | Path | None, overrides: Iterable[str] = ()) -> RunConfig:
    if path is None:
        cfg = RunConfig()
    else:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        cfg = parse_config_text(text, str(path))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if not _KEY.match(key) or not value:
            raise ConfigError(f"override {item!r}: expected key=value")
        cfg.values[key] = value
        cfg.origins[key] = "command line"
    return cfg


def parse_alpha_grid(text: str) -> np.ndarray:
    """Parse ``start:stop:points(log|lin)``, e.g. ``0.01:100:41log``."""
    m = _GRID.match(text)
    if not m:
        raise ConfigError(f"alpha grid {text!r}: expected start:stop:points(log|lin)")
    try:
        start, stop = float(m.group(1)), float(m.group(2))
    except ValueError:
        raise ConfigError(f"alpha grid {text!r}: start and stop must be numbers") from None
    points, kind = int(m.group(3)), m.group(4)
    if points < 1:
        raise ConfigError(f"alpha grid {text!r}: needs at least one point")
    if not (math.isfinite(start) and math.isfinite(stop)) or start < 0 or stop < start:
        raise ConfigError(f"alpha grid {text!r}: need 0 <= start <= stop")
    if kind == "log":
        if start <= 0:
            raise ConfigError(f"alpha grid {text!r}: log spacing needs start > 0")
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


_SYSTEM_KEYS = ("e21", "field_amp", "delta", "v_mag", "alpha")


def system_from_config(cfg: RunConfig, alpha: float | None = None,
                       default_alpha: float | None = None) -> SystemConfig:
    """Build a ``SystemConfig`` from one of three parameterizations.

    * ``e21``, ``omega``, ``field_amp``, ``dipole_mag``
    * ``delta``, ``v_mag``, ``omega``
    * ``alpha``, ``delta``, ``omega`` (``alpha`` may also come from a grid)

    Phases ``phi_field``, ``phi1``, ``phi2`` apply to all three. When none of
    ``e21``, ``field_amp``, ``v_mag``, ``alpha`` is given, ``default_alpha``
    (if set) is used; otherwise the field is off.
    """
    if alpha is None and default_alpha is not None and not any(k in cfg for k in _SYSTEM_KEYS if k != "delta"):
        alpha = default_alpha
    omega = cfg.get_float("omega", 100.0, minimum=0.0, exclusive_min=True)
    dipole_mag = cfg.get_float("dipole_mag", 1.0, minimum=0.0, exclusive_min=True)
    phases = {k: cfg.get_float(k, 0.0) for k in ("phi_field", "phi1", "phi2")}
    has_bare = "e21" in cfg or "field_amp" in cfg
    has_dressed = "v_mag" in cfg
    has_alpha = alpha is not None or "alpha" in cfg
    if sum((has_bare, has_dressed, has_alpha)) > 1:
        raise ConfigError("give the system as one of: e21/field_amp, delta/v_mag, or alpha/delta")
    try:
        if has_bare:
            if "delta" in cfg:
                raise ConfigError("'delta' cannot be combined with 'e21'; use one of them")
            e21 = cfg.get_float("e21", minimum=0.0, exclusive_min=True)
            if e21 is None:
                raise ConfigError("key 'e21' is required with 'field_amp'")
            field_amp = cfg.get_float("field_amp", 0.0, minimum=0.0)
            return SystemConfig(e21, omega, dipole_mag, field_amp, **phases)
        delta = cfg.get_float("delta", 1.0)
        if has_alpha:
            if alpha is None:
                alpha = cfg.get_float("alpha", minimum=0.0)
            else:
                cfg.raw("alpha")
            if delta == 0:
                raise ConfigError("alpha needs a nonzero delta; use v_mag at zero detuning")
            return SystemConfig.from_alpha(alpha, delta=delta, omega=omega, dipole_mag=dipole_mag, **phases)
        v_mag = cfg.get_float("v_mag", 0.0, minimum=0.0)
        return SystemConfig.from_detuning(delta, v_mag, omega=omega, dipole_mag=dipole_mag, **phases)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
