"""Flat ``key = value`` run configurations and the shipped figure fixtures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

COMMANDS = ("spectrum", "g2map", "g2tau", "decompose", "quantifiers", "gaussian-check")
MODELS = ("rf", "cavity")
FIXTURES = ("fig2a", "fig2b", "fig2f", "fig3a", "fig3b")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending line or key."""


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


SCHEMA = {
    "model": str,
    "delta_sigma": float, "omega_sigma": float, "gamma_sigma": float,
    "delta_a": float, "lambda": float, "omega_a": float, "theta_drive": float,
    "gamma_a": float, "n_max": int,
    "big_gamma": float, "epsilon": float, "sensor_levels": int,
    "homodyne_f": float,
    "varpi1": float, "varpi2": float,
    "tau_max": float, "tau_count": int, "filtered": _bool,
    "grid": str, "spectrum_method": str,
    "seed": int, "draws": int, "eps_max": float, "gaussian_n_max": int,
}

DEFAULTS = {
    "gamma_sigma": 1.0, "gamma_a": 1.0, "n_max": 15, "homodyne_f": 0.0,
    "varpi1": 0.0, "varpi2": 0.0, "tau_max": 10.0, "tau_count": 201, "filtered": True,
    "spectrum_method": "expansion", "seed": 12345, "draws": 50, "eps_max": 0.05,
    "gaussian_n_max": 12,
}

REQUIRED = {
    "rf": ("delta_sigma", "omega_sigma"),
    "cavity": ("delta_a", "lambda"),
}


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[tuple[float, float, int], ...]

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        axes = []
        for part in text.split(","):
            bits = part.strip().split(":")
            if len(bits) != 3:
                raise ConfigError(f"grid axis {part!r} is not min:max:count")
            try:
                lo, hi, n = float(bits[0]), float(bits[1]), int(bits[2])
            except ValueError as exc:
                raise ConfigError(f"grid axis {part!r}: {exc}") from None
            if not (math.isfinite(lo) and math.isfinite(hi)) or n < 1 or (n > 1 and hi <= lo):
                raise ConfigError(f"grid axis {part!r} must be finite, ascending, count >= 1")
            axes.append((lo, hi, n))
        if len(axes) > 2:
            raise ConfigError("at most two grid axes")
        return cls(tuple(axes))

    def pair(self):
        return (self.axes[0], self.axes[-1])


@dataclass
class RunConfig:
    command: str
    model: str
    params: dict
    grid: GridSpec | None = None
    out: Path | None = None
    workers: int = 1
    source: str = ""
    sets: list = field(default_factory=list)

    def get(self, key):
        return self.params.get(key, DEFAULTS.get(key))


def fixture_text(name: str) -> str:
    return resources.files("twophotons.fixtures").joinpath(f"{name}.cfg").read_text()


def parse_lines(text: str, origin: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = _convert(key, value, f"{origin}:{lineno}")
    return out


def _convert(key: str, value: str, where: str):
    if key not in SCHEMA:
        raise ConfigError(f"{where}: unknown key {key!r}")
    try:
        v = SCHEMA[key](value)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key}: {exc}") from None
    if isinstance(v, float) and not math.isfinite(v):
        raise ConfigError(f"{where}: {key} must be finite")
    return v


def parse_config(command: str, config: str | None = None, sets=(), *, grid: str | None = None,
                 out=None, workers: int | None = None) -> RunConfig:
    """Load a file or fixture name, apply ``--set`` overrides, validate.

    Raises
    ------
    ConfigError
        On unknown or missing keys and on invariant violations.
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    params: dict = {}
    source = ""
    if config is not None:
        path = Path(config)
        if path.is_file():
            params.update(parse_lines(path.read_text(), str(path)))
            source = str(path)
        elif config in FIXTURES:
            params.update(parse_lines(fixture_text(config), config))
            source = f"fixture:{config}"
        else:
            raise ConfigError(f"config {config!r} is neither a file nor a fixture {FIXTURES}")
    for item in sets:
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, value = (s.strip() for s in item.split("=", 1))
        params[key] = _convert(key, value, f"--set {key}")
    if command == "gaussian-check":
        model = params.pop("model", "rf")
    else:
        model = params.get("model")
        if model is None:
            raise ConfigError("missing required key 'model'")
        if model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
        for key in REQUIRED[model]:
            if key not in params:
                raise ConfigError(f"missing required key {key!r} for model {model}")
        if "big_gamma" not in params and not (command == "g2tau" and params.get("filtered") is False):
            raise ConfigError("missing required key 'big_gamma'")
    grid_text = grid if grid is not None else params.get("grid")
    spec = GridSpec.parse(grid_text) if grid_text else None
    if workers is not None and workers < 1:
        raise ConfigError("--workers must be at least 1")
    _validate(params)
    return RunConfig(command, model, params, spec, Path(out) if out else None,
                     workers or 1, source, list(sets))


def _validate(p: dict):
    for key in ("gamma_sigma", "gamma_a", "big_gamma", "epsilon", "tau_max", "eps_max"):
        if key in p and not p[key] > 0:
            raise ConfigError(f"{key} must be positive")
    if p.get("omega_sigma", 0) < 0:
        raise ConfigError("omega_sigma must be non-negative")
    if "lambda" in p and not 0 <= p["lambda"] < 1:
        raise ConfigError("lambda must lie in [0, 1) for a stable cavity")
    if "homodyne_f" in p and not 0 <= p["homodyne_f"] <= 1:
        raise ConfigError("homodyne_f must lie in [0, 1]")
    if p.get("n_max", 2) < 2:
        raise ConfigError("n_max must be at least 2")
    if p.get("sensor_levels", 2) < 2:
        raise ConfigError("sensor_levels must be at least 2")
    if p.get("spectrum_method", "expansion") not in ("expansion", "direct"):
        raise ConfigError("spectrum_method must be 'expansion' or 'direct'")
    for key in ("tau_count", "draws"):
        if key in p and p[key] < 1:
            raise ConfigError(f"{key} must be at least 1")
